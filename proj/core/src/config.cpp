#include "dataagent/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace da {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
  }
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x < 0 || x != static_cast<double>(static_cast<std::uint64_t>(x))) {
    throw ConfigError("config key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return static_cast<std::uint64_t>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': '" + v + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

}  // namespace

RunConfig RunConfig::defaults() {
  RunConfig c;
  const char* env = std::getenv("DATA_AGENT_OUT");
  c.output_dir = env != nullptr ? env : "./out";
  return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig c = defaults();
  bool generator_is_file = false;
  bool have_path = false;

  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "dataset.generator") {
      if (val != "mixture" && val != "rings" && val != "file") {
        throw ConfigError("config key 'dataset.generator': unknown generator '" + val + "'");
      }
      c.dataset.generator = val;
      generator_is_file = val == "file";
    } else if (key == "dataset.path") {
      c.dataset.path = val;
      have_path = true;
    } else if (key == "dataset.seed") {
      c.dataset.seed = to_count(key, val);
    } else if (key == "dataset.noise_rate") {
      c.dataset.noise_rate = to_double(key, val);
    } else if (key == "model.hidden_dims") {
      c.model.hidden_dims.clear();
      for (const auto& s : split_list(val)) c.model.hidden_dims.push_back(to_count(key, s));
    } else if (key == "model.lr") {
      c.model.lr = to_double(key, val);
    } else if (key == "model.batch") {
      c.model.batch = to_count(key, val);
    } else if (key == "model.momentum") {
      c.model.momentum = to_double(key, val);
    } else if (key == "loop.ratio") {
      c.loop.ratio = to_double(key, val);
    } else if (key == "loop.epochs") {
      c.loop.epochs = to_count(key, val);
    } else if (key == "loop.warmup_epochs") {
      c.loop.warmup_epochs = to_count(key, val);
    } else if (key == "loop.score_period") {
      c.loop.score_period = to_count(key, val);
    } else if (key == "loop.horizon_w") {
      c.loop.horizon_w = to_count(key, val);
    } else if (key == "loop.agent_update_period") {
      c.loop.agent_update_period = to_count(key, val);
    } else if (key == "agent.gamma") {
      c.agent.ppo.gamma = to_double(key, val);
    } else if (key == "agent.lambda") {
      c.agent.ppo.lambda = to_double(key, val);
    } else if (key == "agent.clip_eps") {
      c.agent.ppo.clip_eps = to_double(key, val);
    } else if (key == "agent.update_epochs") {
      c.agent.ppo.update_epochs = to_count(key, val);
    } else if (key == "agent.minibatch") {
      c.agent.ppo.minibatch = to_count(key, val);
    } else if (key == "agent.lr") {
      c.agent.ppo.agent_lr = to_double(key, val);
    } else if (key == "agent.value_coeff") {
      c.agent.ppo.value_coeff = to_double(key, val);
    } else if (key == "agent.hidden") {
      c.agent.hidden = to_count(key, val);
    } else if (key == "agent.logstd_init") {
      c.agent.log_std_init = to_double(key, val);
    } else if (key == "reward.epsilon") {
      c.reward.epsilon = to_double(key, val);
    } else if (key == "reward.use_consistency") {
      c.reward.use_consistency = to_bool(key, val);
    } else if (key == "bench.strategies") {
      c.bench.strategies = split_list(val);
      for (const auto& s : c.bench.strategies) {
        try {
          strategy_from_string(s);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("config key 'bench.strategies': " + std::string(e.what()));
        }
      }
    } else if (key == "bench.seeds") {
      c.bench.seeds.clear();
      for (const auto& s : split_list(val)) c.bench.seeds.push_back(to_count(key, s));
      if (c.bench.seeds.empty()) throw ConfigError("config key 'bench.seeds': empty list");
    } else if (key == "output.dir") {
      c.output_dir = val;
    } else {
      throw ConfigError("unknown config key '" + key + "' at line " + std::to_string(line_no));
    }
  }

  if (generator_is_file && !have_path) {
    throw ConfigError("missing config key 'dataset.path' (required when dataset.generator = file)");
  }
  if (c.dataset.noise_rate < 0.0 || c.dataset.noise_rate >= 1.0) {
    throw ConfigError("config key 'dataset.noise_rate': must be in [0, 1)");
  }
  return c;
}

Dataset RunConfig::make_dataset() const {
  Dataset ds;
  if (dataset.generator == "file") {
    ds = load_dataset(dataset.path);
  } else if (dataset.generator == "rings") {
    ds = gen_rings(2000, 500, dataset.seed);
  } else {
    ds = gen_mixture(default_benchmark_spec(dataset.seed));
  }
  if (dataset.noise_rate > 0.0) {
    inject_label_noise(ds, NoiseSpec{dataset.noise_rate, mix_seed(dataset.seed, 9), 0.05});
  }
  return ds;
}

}  // namespace da
