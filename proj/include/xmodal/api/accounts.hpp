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

#include <sodium.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "xmodal/api/kv_store.hpp"
#include "xmodal/core/error.hpp"
#include "xmodal/request/session.hpp"

namespace xmodal::api {

struct Account {
    std::string account_id;
    std::string username;
    std::string display_name;
    std::string album_gallery_id;
    std::string auth_token_hash;  // most recently issued token
    std::string password_hash;    // argon2id string, never the password
};

inline nlohmann::json to_json(const Account& a) {
    return {{"account_id", a.account_id},         {"username", a.username},
            {"display_name", a.display_name},     {"album_gallery_id", a.album_gallery_id},
            {"auth_token_hash", a.auth_token_hash}, {"password_hash", a.password_hash}};
}

inline Account account_from_json(const nlohmann::json& j) {
    try {
        return {j.at("account_id"),       j.at("username"),        j.at("display_name"),
                j.at("album_gallery_id"), j.at("auth_token_hash"), j.at("password_hash")};
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Internal, std::string("stored account is corrupt: ") + e.what());
    }
}

struct PasswordHashing {
    unsigned long long opslimit = crypto_pwhash_OPSLIMIT_INTERACTIVE;
    std::size_t memlimit = crypto_pwhash_MEMLIMIT_INTERACTIVE;

    /// Cheapest accepted settings, for tests.
    static PasswordHashing minimal() { return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN}; }
};

struct IssuedToken {
    Account account;
    std::string token;  // returned to the client once, stored only as a hash
};

inline void ensure_sodium() {
    if (sodium_init() < 0) fail(ErrorCode::Internal, "libsodium failed to initialize");
}

inline std::string to_hex(const unsigned char* data, std::size_t size) {
    std::string out(size * 2 + 1, '\0');
    sodium_bin2hex(out.data(), out.size(), data, size);
    out.pop_back();
    return out;
}

inline std::string token_hash(std::string_view token) {
    unsigned char digest[crypto_generichash_BYTES];
    crypto_generichash(digest, sizeof digest, reinterpret_cast<const unsigned char*>(token.data()), token.size(),
                       nullptr, 0);
    return to_hex(digest, sizeof digest);
}

/// Registration, login and bearer-token lookup over the KV store.
class Accounts {
public:
    static constexpr std::size_t kMinPassword = 8;
    static constexpr std::size_t kMaxPassword = 1024;

    explicit Accounts(KvStore& kv, PasswordHashing hashing = {}) : kv_(&kv), hashing_(hashing) { ensure_sodium(); }

    /// Usernames are 3 to 32 characters of [a-z0-9_.-], compared case-insensitively.
    static std::string normalize_username(std::string_view name) {
        if (name.size() < 3 || name.size() > 32)
            fail(ErrorCode::InvalidArgument, "username must be 3 to 32 characters");
        std::string out;
        for (unsigned char c : name) {
            if (!(std::isalnum(c) || c == '_' || c == '.' || c == '-'))
                fail(ErrorCode::InvalidArgument, "username may hold letters, digits, '_', '.' and '-' only");
            out.push_back(static_cast<char>(std::tolower(c)));
        }
        return out;
    }

    IssuedToken register_account(std::string_view username, std::string_view password,
                                 std::string_view display_name = {}) {
        const std::string name = normalize_username(username);
        check_password(password);
        if (display_name.size() > 100) fail(ErrorCode::InvalidArgument, "display name is longer than 100 bytes");

        Account a;
        a.account_id = request::random_hex_id();
        a.username = name;
        a.display_name = display_name.empty() ? name : std::string(display_name);
        a.album_gallery_id = "album-" + a.account_id;
        a.password_hash = hash_password(password);
        const std::string token = new_token();
        a.auth_token_hash = token_hash(token);

        kv_->transaction([&](KvStore::Txn& t) {
            if (!t.insert("username", name, a.account_id))
                fail(ErrorCode::UsernameTaken, "username '" + name + "' is taken");
            t.put("account", a.account_id, to_json(a).dump());
            t.put("token", a.auth_token_hash, a.account_id);
        });
        return {a, token};
    }

    IssuedToken login(std::string_view username, std::string_view password) {
        std::string name;
        try {
            name = normalize_username(username);
        } catch (const Error&) {
            fail(ErrorCode::Unauthenticated, "invalid username or password");
        }
        auto account = find_by_username(name);
        if (!account || password.size() > kMaxPassword ||
            crypto_pwhash_str_verify(account->password_hash.c_str(), password.data(), password.size()) != 0)
            fail(ErrorCode::Unauthenticated, "invalid username or password");

        const std::string token = new_token();
        const std::string hash = token_hash(token);
        kv_->transaction([&](KvStore::Txn& t) {
            const auto raw = t.get("account", account->account_id);
            if (!raw) fail(ErrorCode::Unauthenticated, "account no longer exists");
            auto current = account_from_json(nlohmann::json::parse(*raw));
            current.auth_token_hash = hash;
            t.put("account", current.account_id, to_json(current).dump());
            t.put("token", hash, current.account_id);
            *account = current;
        });
        return {*account, token};
    }

    /// The account a bearer token belongs to, if any.
    std::optional<Account> authenticate(std::string_view token) {
        if (token.empty() || token.size() > 256) return std::nullopt;
        const std::string hash = token_hash(token);
        return kv_->transaction([&](KvStore::Txn& t) -> std::optional<Account> {
            const auto id = t.get("token", hash);
            if (!id) return std::nullopt;
            const auto raw = t.get("account", *id);
            if (!raw) return std::nullopt;
            return account_from_json(nlohmann::json::parse(*raw));
        });
    }

    std::optional<Account> find(std::string_view account_id) {
        const auto raw = kv_->get("account", account_id);
        if (!raw) return std::nullopt;
        return account_from_json(nlohmann::json::parse(*raw));
    }

private:
    std::optional<Account> find_by_username(const std::string& name) {
        const auto id = kv_->get("username", name);
        return id ? find(*id) : std::nullopt;
    }

    static void check_password(std::string_view password) {
        if (password.size() < kMinPassword || password.size() > kMaxPassword)
            fail(ErrorCode::InvalidArgument, "password must be 8 to 1024 bytes");
    }

    std::string hash_password(std::string_view password) const {
        char out[crypto_pwhash_STRBYTES];
        if (crypto_pwhash_str(out, password.data(), password.size(), hashing_.opslimit, hashing_.memlimit) != 0)
            fail(ErrorCode::Internal, "password hashing ran out of memory");
        return out;
    }

    static std::string new_token() {
        unsigned char raw[32];
        randombytes_buf(raw, sizeof raw);
        return to_hex(raw, sizeof raw);
    }

    KvStore* kv_;
    PasswordHashing hashing_;
};

/// Chat sessions persisted as JSON documents in the KV store.
class KvSessionStore final : public request::SessionStore {
public:
    explicit KvSessionStore(KvStore& kv) : kv_(&kv) {}

    std::optional<request::ChatSession> load(const std::string& id) const override {
        const auto raw = kv_->get("session", id);
        if (!raw) return std::nullopt;
        return request::session_from_json(nlohmann::json::parse(*raw));
    }
    void save(const request::ChatSession& session) override {
        kv_->put("session", session.id, request::to_json(session).dump());
    }

private:
    KvStore* kv_;
};

}  // namespace xmodal::api
