// Copyright 2026 The xmodal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <sqlite3.h>

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xmodal/core/error.hpp"

namespace xmodal::api {

/// Transactional string key-value store in one SQLite table, keyed by
/// (namespace, key). One connection shared under a mutex.
class KvStore {
public:
    explicit KvStore(const std::filesystem::path& path) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_NOMUTEX,
                            nullptr) != SQLITE_OK) {
            const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
            sqlite3_close(db_);
            fail(ErrorCode::Internal, "cannot open " + path.string() + ": " + msg);
        }
        sqlite3_busy_timeout(db_, 5000);
        exec("PRAGMA journal_mode=WAL");
        exec("PRAGMA synchronous=NORMAL");
        exec("CREATE TABLE IF NOT EXISTS kv (ns TEXT NOT NULL, key TEXT NOT NULL, value TEXT NOT NULL, "
             "PRIMARY KEY (ns, key)) WITHOUT ROWID");
    }
    KvStore(const KvStore&) = delete;
    KvStore& operator=(const KvStore&) = delete;
    ~KvStore() { sqlite3_close(db_); }

    /// Handle valid inside transaction(); all calls on it share one commit.
    class Txn {
    public:
        std::optional<std::string> get(std::string_view ns, std::string_view key) {
            Statement st(kv_->db_, "SELECT value FROM kv WHERE ns = ?1 AND key = ?2");
            st.bind(1, ns).bind(2, key);
            if (!st.step()) return std::nullopt;
            return st.column_text(0);
        }
        void put(std::string_view ns, std::string_view key, std::string_view value) {
            Statement st(kv_->db_, "INSERT INTO kv (ns, key, value) VALUES (?1, ?2, ?3) "
                                   "ON CONFLICT (ns, key) DO UPDATE SET value = excluded.value");
            st.bind(1, ns).bind(2, key).bind(3, value);
            st.step();
        }
        /// False if the key already exists.
        bool insert(std::string_view ns, std::string_view key, std::string_view value) {
            Statement st(kv_->db_, "INSERT OR IGNORE INTO kv (ns, key, value) VALUES (?1, ?2, ?3)");
            st.bind(1, ns).bind(2, key).bind(3, value);
            st.step();
            return sqlite3_changes(kv_->db_) == 1;
        }
        bool erase(std::string_view ns, std::string_view key) {
            Statement st(kv_->db_, "DELETE FROM kv WHERE ns = ?1 AND key = ?2");
            st.bind(1, ns).bind(2, key);
            st.step();
            return sqlite3_changes(kv_->db_) == 1;
        }
        std::vector<std::pair<std::string, std::string>> list(std::string_view ns) {
            Statement st(kv_->db_, "SELECT key, value FROM kv WHERE ns = ?1 ORDER BY key");
            st.bind(1, ns);
            std::vector<std::pair<std::string, std::string>> out;
            while (st.step()) out.emplace_back(st.column_text(0), st.column_text(1));
            return out;
        }

    private:
        friend class KvStore;
        explicit Txn(KvStore* kv) : kv_(kv) {}
        KvStore* kv_;
    };

    /// Runs `fn` inside BEGIN IMMEDIATE ... COMMIT; rolls back if it throws.
    template <class F>
    auto transaction(F&& fn) {
        std::lock_guard lock(mu_);
        exec("BEGIN IMMEDIATE");
        Txn txn(this);
        try {
            if constexpr (std::is_void_v<decltype(fn(txn))>) {
                fn(txn);
                exec("COMMIT");
            } else {
                auto result = fn(txn);
                exec("COMMIT");
                return result;
            }
        } catch (...) {
            sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
            throw;
        }
    }

    std::optional<std::string> get(std::string_view ns, std::string_view key) {
        return transaction([&](Txn& t) { return t.get(ns, key); });
    }
    void put(std::string_view ns, std::string_view key, std::string_view value) {
        transaction([&](Txn& t) { t.put(ns, key, value); });
    }
    bool insert(std::string_view ns, std::string_view key, std::string_view value) {
        return transaction([&](Txn& t) { return t.insert(ns, key, value); });
    }
    bool erase(std::string_view ns, std::string_view key) {
        return transaction([&](Txn& t) { return t.erase(ns, key); });
    }
    std::vector<std::pair<std::string, std::string>> list(std::string_view ns) {
        return transaction([&](Txn& t) { return t.list(ns); });
    }

private:
    class Statement {
    public:
        Statement(sqlite3* db, const char* sql) : db_(db) {
            if (sqlite3_prepare_v2(db, sql, -1, &st_, nullptr) != SQLITE_OK)
                fail(ErrorCode::Internal, std::string("sqlite prepare: ") + sqlite3_errmsg(db));
        }
        Statement(const Statement&) = delete;
        Statement& operator=(const Statement&) = delete;
        ~Statement() { sqlite3_finalize(st_); }

        Statement& bind(int index, std::string_view text) {
            if (sqlite3_bind_text(st_, index, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT) != SQLITE_OK)
                fail(ErrorCode::Internal, std::string("sqlite bind: ") + sqlite3_errmsg(db_));
            return *this;
        }
        /// True while a row is available.
        bool step() {
            const int rc = sqlite3_step(st_);
            if (rc == SQLITE_ROW) return true;
            if (rc == SQLITE_DONE) return false;
            fail(ErrorCode::Internal, std::string("sqlite step: ") + sqlite3_errmsg(db_));
        }
        std::string column_text(int col) {
            const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st_, col));
            return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st_, col))) : std::string();
        }

    private:
        sqlite3* db_;
        sqlite3_stmt* st_ = nullptr;
    };

    void exec(const char* sql) {
        char* err = nullptr;
        if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
            const std::string msg = err ? err : "unknown error";
            sqlite3_free(err);
            fail(ErrorCode::Internal, std::string("sqlite: ") + msg);
        }
    }

    sqlite3* db_ = nullptr;
    std::mutex mu_;
};

}  // namespace xmodal::api
