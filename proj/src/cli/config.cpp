#include "sot/cli/config.hpp"

#include "sot/error.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

namespace sot::cli {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& field, const std::string& reason) {
  throw Error(ErrorCode::BadConfig, field + ": " + reason);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) bad(where, "must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) bad(where.empty() ? key : where + "." + key, "unknown key");
  }
}

template <typename T>
T get(const json& obj, const std::string& key, const std::string& field) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(field, "missing or of the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

pipeline::Decoding read_decoding(const json& j, const std::string& field, pipeline::Decoding d) {
  allow_keys(j, field, {"temperature", "top_p", "max_tokens"});
  if (j.contains("temperature")) d.temperature = get<double>(j, "temperature", field + ".temperature");
  if (j.contains("top_p")) d.top_p = get<double>(j, "top_p", field + ".top_p");
  if (j.contains("max_tokens")) d.max_tokens = get<int>(j, "max_tokens", field + ".max_tokens");
  return d;
}

void check_decoding(const pipeline::Decoding& d, const std::string& field) {
  if (!(d.temperature >= 0.0 && d.temperature <= 2.0)) bad(field + ".temperature", "must be in [0, 2]");
  if (!(d.top_p > 0.0 && d.top_p <= 1.0)) bad(field + ".top_p", "must be in (0, 1]");
  if (d.max_tokens <= 0) bad(field + ".max_tokens", "must be positive");
}

json decoding_json(const pipeline::Decoding& d) {
  return {{"temperature", d.temperature}, {"top_p", d.top_p}, {"max_tokens", d.max_tokens}};
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  allow_keys(j, "", {"backend", "model", "decoding", "stage_decoding", "strategy", "dataset", "seeds", "parallelism",
                     "templates", "cache_dir", "out_dir", "retry"});
  RunConfig c;

  if (!j.contains("backend")) bad("backend", "missing");
  const auto& b = j["backend"];
  allow_keys(b, "backend", {"kind", "script", "base_url", "timeout_s"});
  const auto kind = get<std::string>(b, "kind", "backend.kind");
  if (kind == "mock") {
    c.backend.kind = BackendConfig::Kind::Mock;
    c.backend.mock_script = resolve(base_dir, get<std::string>(b, "script", "backend.script"));
  } else if (kind == "remote") {
    c.backend.kind = BackendConfig::Kind::Remote;
    if (b.contains("base_url")) c.backend.base_url = get<std::string>(b, "base_url", "backend.base_url");
    if (const char* env = std::getenv("SOT_BASE_URL"); env && *env) c.backend.base_url = env;
    if (b.contains("timeout_s")) c.backend.timeout_s = get<int>(b, "timeout_s", "backend.timeout_s");
  } else {
    bad("backend.kind", "must be 'mock' or 'remote'");
  }

  c.model = get<std::string>(j, "model", "model");
  if (j.contains("decoding")) c.decoding = read_decoding(j["decoding"], "decoding", c.decoding);
  if (j.contains("stage_decoding")) {
    if (!j["stage_decoding"].is_object()) bad("stage_decoding", "must be an object");
    for (const auto& [stage, d] : j["stage_decoding"].items()) {
      pipeline::Stage s;
      try {
        s = pipeline::stage_from_string(stage);
      } catch (const Error&) {
        bad("stage_decoding." + stage, "unknown stage");
      }
      c.stage_decoding[s] = read_decoding(d, "stage_decoding." + stage, c.decoding);
    }
  }

  if (!j.contains("strategy")) bad("strategy", "missing");
  const auto& s = j["strategy"];
  allow_keys(s, "strategy", {"name", "n", "beta", "mu", "beta_max", "mu_max"});
  const auto name = get<std::string>(s, "name", "strategy.name");
  try {
    c.strategy.name = strategy_from_string(name);
  } catch (const Error&) {
    bad("strategy.name", "must be cot, cot_sc or sot");
  }
  if (s.contains("n")) c.strategy.n = get<int>(s, "n", "strategy.n");
  if (s.contains("beta_max")) c.strategy.beta_max = get<int>(s, "beta_max", "strategy.beta_max");
  if (s.contains("mu_max")) c.strategy.mu_max = get<int>(s, "mu_max", "strategy.mu_max");
  if (s.contains("beta") != s.contains("mu")) bad("strategy", "beta and mu must be given together (or neither for auto)");
  if (s.contains("beta")) c.strategy.forced = {get<int>(s, "beta", "strategy.beta"), get<int>(s, "mu", "strategy.mu")};

  if (!j.contains("dataset")) bad("dataset", "missing");
  const auto& d = j["dataset"];
  allow_keys(d, "dataset", {"path", "format", "limit", "shuffle_seed"});
  c.dataset.path = resolve(base_dir, get<std::string>(d, "path", "dataset.path"));
  try {
    c.dataset.format = datasets::dataset_format_from_string(get<std::string>(d, "format", "dataset.format"));
  } catch (const Error&) {
    bad("dataset.format", "must be numeric_jsonl or choice_jsonl");
  }
  if (d.contains("limit")) {
    const auto limit = get<std::int64_t>(d, "limit", "dataset.limit");
    if (limit < 1) bad("dataset.limit", "must be >= 1");
    c.dataset.limit = static_cast<std::size_t>(limit);
  }
  if (d.contains("shuffle_seed")) c.dataset.shuffle_seed = get<std::uint64_t>(d, "shuffle_seed", "dataset.shuffle_seed");

  c.seeds = get<std::vector<std::int64_t>>(j, "seeds", "seeds");
  if (j.contains("parallelism")) c.parallelism = get<int>(j, "parallelism", "parallelism");

  if (j.contains("templates")) {
    if (!j["templates"].is_object()) bad("templates", "must be an object");
    for (const auto& [stage, path] : j["templates"].items()) {
      pipeline::Stage st;
      try {
        st = pipeline::stage_from_string(stage);
      } catch (const Error&) {
        bad("templates." + stage, "unknown stage");
      }
      if (!path.is_string()) bad("templates." + stage, "must be a path string");
      c.templates[st] = resolve(base_dir, path.get<std::string>());
    }
  }
  if (j.contains("cache_dir") && !j["cache_dir"].is_null()) {
    c.cache_dir = resolve(base_dir, get<std::string>(j, "cache_dir", "cache_dir"));
  }
  c.out_dir = resolve(base_dir, get<std::string>(j, "out_dir", "out_dir"));

  if (j.contains("retry")) {
    const auto& r = j["retry"];
    allow_keys(r, "retry", {"max_retries", "base_delay_ms", "multiplier", "jitter"});
    if (r.contains("max_retries")) c.retry.max_retries = get<int>(r, "max_retries", "retry.max_retries");
    if (r.contains("base_delay_ms"))
      c.retry.base_delay = std::chrono::milliseconds(get<std::int64_t>(r, "base_delay_ms", "retry.base_delay_ms"));
    if (r.contains("multiplier")) c.retry.multiplier = get<double>(r, "multiplier", "retry.multiplier");
    if (r.contains("jitter")) c.retry.jitter = get<bool>(r, "jitter", "retry.jitter");
  }

  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "config file not readable: " + path.string());
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::BadConfig, "config is not valid JSON: " + path.string());
  return from_json(j, path.parent_path());
}

void RunConfig::validate() const {
  if (backend.kind == BackendConfig::Kind::Mock && backend.mock_script.empty()) bad("backend.script", "missing");
  if (backend.kind == BackendConfig::Kind::Remote && backend.base_url.empty())
    bad("backend.base_url", "missing (set it in the config or SOT_BASE_URL)");
  if (backend.timeout_s <= 0) bad("backend.timeout_s", "must be positive");
  if (model.empty()) bad("model", "must be nonempty");
  check_decoding(decoding, "decoding");
  for (const auto& [stage, d] : stage_decoding) check_decoding(d, "stage_decoding." + std::string(to_string(stage)));

  if (strategy.name == Strategy::CotSc) {
    if (strategy.n < 1) bad("strategy.n", "must be >= 1");
    const auto it = stage_decoding.find(pipeline::Stage::Cot);
    const double t = it == stage_decoding.end() ? decoding.temperature : it->second.temperature;
    if (strategy.n > 1 && t <= 0.0) bad("decoding.temperature", "cot_sc with n > 1 requires temperature > 0");
  }
  if (strategy.beta_max < 1 || strategy.mu_max < 1) bad("strategy", "beta_max and mu_max must be >= 1");
  if (strategy.forced) {
    const auto [beta, mu] = *strategy.forced;
    if (beta < 1 || beta > strategy.beta_max) bad("strategy.beta", "must be in [1, beta_max]");
    if (mu < 1 || mu > strategy.mu_max) bad("strategy.mu", "must be in [1, mu_max]");
  }
  if (seeds.empty()) bad("seeds", "must be nonempty");
  if (std::set<std::int64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) bad("seeds", "must be distinct");
  if (parallelism < 1) bad("parallelism", "must be >= 1");
  if (retry.max_retries < 0) bad("retry.max_retries", "must be >= 0");
  if (retry.base_delay.count() < 0) bad("retry.base_delay_ms", "must be >= 0");
  if (out_dir.empty()) bad("out_dir", "missing");
}

json RunConfig::to_json() const {
  json j;
  if (backend.kind == BackendConfig::Kind::Mock) {
    j["backend"] = {{"kind", "mock"}, {"script", backend.mock_script.string()}};
  } else {
    j["backend"] = {{"kind", "remote"}, {"base_url", backend.base_url}, {"timeout_s", backend.timeout_s}};
  }
  j["model"] = model;
  j["decoding"] = decoding_json(decoding);
  j["stage_decoding"] = json::object();
  for (const auto& [stage, d] : stage_decoding) j["stage_decoding"][std::string(to_string(stage))] = decoding_json(d);
  json s = {{"name", sot::to_string(strategy.name)}};
  if (strategy.name == Strategy::CotSc) s["n"] = strategy.n;
  if (strategy.name == Strategy::Sot) {
    if (strategy.forced) {
      s["beta"] = strategy.forced->first;
      s["mu"] = strategy.forced->second;
    }
    s["beta_max"] = strategy.beta_max;
    s["mu_max"] = strategy.mu_max;
  }
  j["strategy"] = std::move(s);
  json d = {{"path", dataset.path.string()}, {"format", datasets::to_string(dataset.format)}};
  if (dataset.limit) d["limit"] = *dataset.limit;
  if (dataset.shuffle_seed) d["shuffle_seed"] = *dataset.shuffle_seed;
  j["dataset"] = std::move(d);
  j["seeds"] = seeds;
  j["parallelism"] = parallelism;
  j["templates"] = json::object();
  for (const auto& [stage, path] : templates) j["templates"][std::string(to_string(stage))] = path.string();
  j["cache_dir"] = cache_dir ? json(cache_dir->string()) : json(nullptr);
  j["out_dir"] = out_dir.string();
  j["retry"] = {{"max_retries", retry.max_retries},
                {"base_delay_ms", retry.base_delay.count()},
                {"multiplier", retry.multiplier},
                {"jitter", retry.jitter}};
  return j;
}

}  // namespace sot::cli
