// kgforge command line: pipeline stages, the full daily run and the query
// service.
//
// Exit codes: 0 ok, 1 usage, 2 stage failure, 3 validation violations.

#include <signal.h>

#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kgforge/endpoint.hpp"
#include "kgforge/pipeline.hpp"

namespace {

using kgforge::Pipeline;
using kgforge::PipelineConfig;
using nlohmann::json;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kStageFailure = 2;
constexpr int kViolations = 3;

int serve(const PipelineConfig& cfg) {
  // Block the signals before any thread starts so that only sigwait sees
  // them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto snapshot = std::make_shared<const kgforge::Store>(kgforge::Store::load(cfg.store_dir));
  kgforge::Endpoint endpoint(snapshot);
  kgforge::Server server(endpoint);
  int port = server.bind(cfg.endpoint.host, cfg.endpoint.port);
  server.start();
  std::cerr << "kgforge: serving " << snapshot->size() << " quads on http://"
            << cfg.endpoint.host << ":" << port << "\n";

  while (true) {
    int sig = 0;
    sigwait(&signals, &sig);
    if (sig != SIGHUP) break;
    // SIGHUP: reload the store written by the latest pipeline run.
    endpoint.begin_swap();
    try {
      endpoint.swap(std::make_shared<const kgforge::Store>(kgforge::Store::load(cfg.store_dir)));
      std::cerr << "kgforge: reloaded " << endpoint.snapshot()->size() << " quads\n";
    } catch (const std::exception& e) {
      endpoint.swap(snapshot);
      std::cerr << "kgforge: reload failed, keeping the previous snapshot: " << e.what() << "\n";
    }
    snapshot = endpoint.snapshot();
  }
  std::cerr << "kgforge: shutting down\n";
  server.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kgforge: JSON-LD records to an ontology-aligned knowledge graph"};
  app.require_subcommand(1);
  std::string config_file = "kgforge.json";
  app.add_option("-c,--config", config_file, "pipeline config file (JSON)");

  auto* harvest = app.add_subcommand("harvest", "fetch records into the raw cache");
  auto* transform = app.add_subcommand("transform", "cached records -> staged quads");
  bool fresh = false;
  auto* load = app.add_subcommand("load", "staged quads -> store");
  load->add_flag("--fresh", fresh, "discard the existing store first");
  auto* validate = app.add_subcommand("validate", "check the store against the shapes");
  std::string stats_format = "both";
  auto* stats = app.add_subcommand("stats", "print store statistics");
  stats->add_option("--format", stats_format, "json, table or both")
      ->check(CLI::IsMember({"json", "table", "both"}));
  auto* serve_cmd = app.add_subcommand("serve", "run the query endpoint");
  auto* run = app.add_subcommand("run", "harvest, transform, load, validate and stats");
  auto* config = app.add_subcommand("config", "print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  PipelineConfig cfg;
  try {
    cfg = PipelineConfig::load(config_file);
  } catch (const std::exception& e) {
    std::cerr << "kgforge: config: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*config) {
      std::cout << cfg.to_json().dump(2) << "\n";
      return kOk;
    }
    if (*serve_cmd) return serve(cfg);

    Pipeline pipeline(cfg);
    if (*harvest) {
      auto s = pipeline.harvest();
      std::cout << s.result.yielded << "\n";
    } else if (*transform) {
      auto s = pipeline.transform();
      std::cout << kgforge::transform_json(s).dump(2) << "\n";
    } else if (*load) {
      auto s = pipeline.load(fresh);
      std::cout << s.inserted << "\n";
    } else if (*validate) {
      auto s = pipeline.validate();
      std::cout << kgforge::report_table(s.report);
      return s.report.violations() == 0 ? kOk : kViolations;
    } else if (*stats) {
      auto st = pipeline.stats();
      if (stats_format != "table") std::cout << kgforge::stats_to_json(st).dump(2) << "\n";
      if (stats_format != "json") std::cout << kgforge::stats_table(st);
    } else if (*run) {
      json summary = pipeline.run();
      std::cout << summary.dump(2) << "\n";
      return summary.value("violations", 0) == 0 ? kOk : kViolations;
    }
  } catch (const kgforge::StageError& e) {
    std::cerr << "kgforge: " << e.what() << "\n";
    return kStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "kgforge: " << e.what() << "\n";
    return kStageFailure;
  }
  return kOk;
}
