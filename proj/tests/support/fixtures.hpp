#pragma once

#include "sot/answer.hpp"
#include "sot/backend/completer.hpp"
#include "sot/backend/mock.hpp"
#include "sot/pipeline/session.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

namespace sot::testing {

inline std::filesystem::path data_dir() { return SOT_TEST_DATA_DIR; }

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "sot-test-XXXXXX").string();
    if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline nlohmann::json rule(std::string match, std::string response, std::int64_t prompt_tokens,
                           std::int64_t completion_tokens) {
  return {{"match", std::move(match)}, {"response", std::move(response)}, {"usage", {prompt_tokens, completion_tokens}}};
}

/// Answers every stage well-formed: analysis {4, 2}, conditions, "#### 18"
/// chains, score 12, CoT "#### 18" (with a minority of "#### 20").
inline nlohmann::json cooperative_script() {
  nlohmann::json cot = {{"match", "Let's think step by step"},
                        {"responses", {"So the total is 18.\n#### 18", "Total 18.\n#### 18", "I get 20.\n#### 20"}},
                        {"usage", {40, 30}}};
  return {{"mode", "rules"},
          {"rules",
           {
               rule("minimality cost", "12", 150, 2),
               rule("Write candidate solution", "Combine the conditions: 9 + 9 = 18.\n#### 18", 120, 60),
               rule("State auxiliary condition", "The total is the sum of both parts.", 80, 12),
               rule("Reply with a single JSON object", "{\"beta\": 4, \"mu\": 2}", 60, 8),
               cot,
           }}};
}

inline pipeline::LlmSession make_session(backend::Completer& completer, backend::CallLog& log,
                                         double temperature = 0.0) {
  pipeline::LlmSession session{completer, log, {}, "mock-model", {}, {}, 1};
  session.decoding.temperature = temperature;
  session.policy.base_delay = std::chrono::milliseconds(0);
  return session;
}

inline std::shared_ptr<backend::MockTransport> mock(const nlohmann::json& script) {
  return std::make_shared<backend::MockTransport>(backend::MockScript::from_json(script));
}

inline Problem numeric_problem(std::string id = "p#1", std::string question = "Tom has 9 red and 9 blue marbles. How many marbles?",
                               std::int64_t gold = 18) {
  Problem p;
  p.id = std::move(id);
  p.question = std::move(question);
  p.kind = TaskKind::Numeric;
  p.gold = CanonicalAnswer::of_number(Rational(gold));
  return p;
}

/// `n` numeric problems whose gold answer is 18.
inline void write_numeric_dataset(const std::filesystem::path& path, int n) {
  std::string content;
  for (int i = 1; i <= n; ++i) {
    nlohmann::json line = {{"question", "Item " + std::to_string(i) + ": Tom has 9 red and 9 blue marbles. How many?"},
                           {"answer", "9 + 9 = 18\n#### 18"}};
    content += line.dump() + "\n";
  }
  write_file(path, content);
}

inline nlohmann::json base_config(const std::filesystem::path& dir, nlohmann::json strategy) {
  return {{"backend", {{"kind", "mock"}, {"script", (dir / "script.json").string()}}},
          {"model", "mock-model"},
          {"decoding", {{"temperature", 0.7}, {"top_p", 1.0}, {"max_tokens", 512}}},
          {"strategy", std::move(strategy)},
          {"dataset", {{"path", (dir / "data.jsonl").string()}, {"format", "numeric_jsonl"}}},
          {"seeds", {1}},
          {"parallelism", 1},
          {"out_dir", (dir / "run").string()},
          {"retry", {{"max_retries", 3}, {"base_delay_ms", 0}}}};
}

}  // namespace sot::testing
