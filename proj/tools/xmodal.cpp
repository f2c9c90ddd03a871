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

// xmodal command line: run the API service, benchmark stores, write
// synthetic fixtures.

#include <signal.h>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xmodal/api/provider_factory.hpp"
#include "xmodal/api/service.hpp"
#include "xmodal/eval/benchmark.hpp"
#include "xmodal/eval/report.hpp"
#include "xmodal/eval/synthetic.hpp"

namespace {

using namespace xmodal;

int serve(const std::string& config_path, int port, const std::string& host) {
    auto cfg = config_path.empty() ? api::ServiceConfig{} : api::load_config(config_path);
    api::apply_env_overrides(cfg);
    if (port >= 0) cfg.port = port;
    if (!host.empty()) cfg.host = host;

    // handle SIGINT/SIGTERM synchronously on this thread
    sigset_t stop_signals;
    sigemptyset(&stop_signals);
    sigaddset(&stop_signals, SIGINT);
    sigaddset(&stop_signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

    auto providers = api::make_providers(cfg);
    api::ApiService service(cfg, providers.view());
    api::ApiServer server(service);
    const int bound = server.bind(cfg.host, cfg.port);
    server.start();
    std::fprintf(stderr, "xmodal: listening on http://%s:%d (%s providers)\n", cfg.host.c_str(), bound,
                 cfg.providers.kind.c_str());

    int sig = 0;
    sigwait(&stop_signals, &sig);
    std::fprintf(stderr, "xmodal: signal %d, draining\n", sig);
    server.stop();
    return 0;
}

struct EvalOptions {
    std::string store;
    std::string query_store;
    std::string judgments;
    std::string queries;
    std::vector<std::size_t> ks{1, 5, 10};
    std::size_t k = 10;
    std::size_t reps = 5;
    std::size_t warmup = 1;
    std::size_t threads = 0;
    double alpha = 0.5;
    bool json = false;
    bool samples = false;
};

int eval_recall(const EvalOptions& o) {
    const auto store = store::RepresentationStore::open(o.store);
    store::StoreHandle queries;
    if (!o.query_store.empty()) queries = store::RepresentationStore::open_pool(o.query_store);
    const auto judgments = o.judgments.empty() ? eval::judgments_from_links(*store) : eval::load_judgments(o.judgments);

    eval::BenchmarkConfig cfg;
    cfg.ks = o.ks;
    cfg.scorer.alpha = o.alpha;
    cfg.rank.threads = o.threads;
    const auto result = eval::run_benchmark(*store, judgments, cfg, queries.get());
    std::cout << (o.json ? eval::to_json(result).dump(2) + "\n" : eval::to_text(result));
    return 0;
}

int eval_latency(const EvalOptions& o) {
    const auto store = store::RepresentationStore::open(o.store);
    const auto queries = eval::load_query_set(o.queries);
    eval::LatencyConfig cfg;
    cfg.k = o.k;
    cfg.scorer.alpha = o.alpha;
    cfg.rank.threads = o.threads;
    cfg.warmup_passes = o.warmup;
    const auto report = eval::time_retrieval(*store, queries, o.reps, cfg);
    std::cout << (o.json ? eval::to_json(report, o.samples).dump(2) + "\n" : eval::to_text(report));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xmodal: cross-modal retrieval service and evaluation tools"};
    app.require_subcommand(1);

    std::string config_path, host;
    int port = -1;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API");
    serve_cmd->add_option("-c,--config", config_path, "Service config (JSON)")->check(CLI::ExistingFile);
    serve_cmd->add_option("-p,--port", port, "Listen port, overrides the config (0 picks one)");
    serve_cmd->add_option("--host", host, "Listen address, overrides the config");

    EvalOptions eo;
    auto* eval_cmd = app.add_subcommand("eval", "Benchmark a representation store");
    eval_cmd->require_subcommand(1);
    auto* recall_cmd = eval_cmd->add_subcommand("recall", "Recall@k in both directions");
    recall_cmd->add_option("-s,--store", eo.store, "Store manifest")->required()->check(CLI::ExistingFile);
    recall_cmd->add_option("-j,--judgments", eo.judgments, "Relevance judgments (default: manifest links)")
        ->check(CLI::ExistingFile);
    recall_cmd->add_option("-q,--query-store", eo.query_store, "Held-out store holding the query representations")
        ->check(CLI::ExistingFile);
    recall_cmd->add_option("-k,--k", eo.ks, "Cutoffs, comma separated")->delimiter(',');

    auto* latency_cmd = eval_cmd->add_subcommand("latency", "Per-query retrieval latency");
    latency_cmd->add_option("-s,--store", eo.store, "Store manifest")->required()->check(CLI::ExistingFile);
    latency_cmd->add_option("-q,--queries", eo.queries, "Query set JSON")->required()->check(CLI::ExistingFile);
    latency_cmd->add_option("-r,--reps", eo.reps, "Timed repetitions per query");
    latency_cmd->add_option("-k,--k", eo.k, "Results per query");
    latency_cmd->add_option("--warmup", eo.warmup, "Untimed passes before measuring");
    latency_cmd->add_flag("--samples", eo.samples, "Include every sample in --json output");

    for (auto* cmd : {recall_cmd, latency_cmd}) {
        cmd->add_option("-a,--alpha", eo.alpha, "Weight of the global cosine")->check(CLI::Range(0.0, 1.0));
        cmd->add_option("-t,--threads", eo.threads, "Ranking threads (0: all cores)");
        cmd->add_flag("--json", eo.json, "Machine-readable output");
    }

    eval::SyntheticSpec spec;
    std::string out_dir;
    std::vector<std::size_t> dims;
    auto* fixture_cmd = app.add_subcommand("fixture", "Write a synthetic store with planted matches");
    fixture_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
    fixture_cmd->add_option("-n,--images", spec.images, "Image count");
    fixture_cmd->add_option("--descriptions-per-image", spec.descriptions_per_image, "Captions per image");
    fixture_cmd->add_option("--dims", dims, "global,local,locals_per_item")->delimiter(',')->expected(3);
    fixture_cmd->add_option("--noise", spec.noise, "Caption noise relative to the image vector");
    fixture_cmd->add_option("--seed", spec.seed, "RNG seed");
    fixture_cmd->add_option("--dtype", spec.dtype, "<f4 or <f2")->check(CLI::IsMember({"<f4", "<f2"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*serve_cmd) return serve(config_path, port, host);
        if (*recall_cmd) return eval_recall(eo);
        if (*latency_cmd) return eval_latency(eo);
        if (*fixture_cmd) {
            if (!dims.empty()) spec.dims = {dims[0], dims[1], dims[2]};
            const auto fx = eval::write_synthetic_store(out_dir, spec);
            std::cout << "manifest:  " << fx.manifest.string() << "\njudgments: " << fx.judgments_file.string() << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "xmodal: %s\n", e.what());
        return 1;
    }
    return 0;
}
