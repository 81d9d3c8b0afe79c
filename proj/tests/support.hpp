#pragma once

// Shared helpers for the test binaries.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "kgforge/graph.hpp"
#include "kgforge/io.hpp"
#include "kgforge/ntriples.hpp"
#include "kgforge/pipeline.hpp"

namespace kgforge::test {

namespace fs = std::filesystem;

inline fs::path source_dir() { return KGFORGE_SOURCE_DIR; }
inline fs::path fixture(const std::string& rel) { return source_dir() / "tests" / "fixtures" / rel; }
inline fs::path corpus_dir() { return fixture("corpus"); }

// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("kgforge-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline Graph read_ntriples_file(const fs::path& p) { return parse_ntriples(read_file(p)); }

// Pipeline configuration over the fixture corpus with every output under
// `root`.
inline PipelineConfig corpus_config(const fs::path& root) {
  PipelineConfig cfg;
  cfg.source.directory = corpus_dir() / "records";
  cfg.rules_dir = source_dir() / "rules";
  cfg.shapes_dir = source_dir() / "shapes";
  cfg.context_file = source_dir() / "rules" / "schema_context.jsonld";
  cfg.store_dir = root / "store";
  cfg.work_dir = root / "work";
  return cfg;
}

// Every regular file below `dir`, relative path -> bytes.
inline std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

// Runs the CLI with `args`; returns its exit status.
inline int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = shell_quote(KGFORGE_CLI) + " " + args + " >" + shell_quote(log.string()) +
                    " 2>&1";
  int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace kgforge::test
