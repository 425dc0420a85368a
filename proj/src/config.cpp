#include "svae/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "svae/errors.hpp"

namespace svae::app {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

double parse_real(const std::string& v, const std::string& key) {
  if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": bad numeric value '" + v + "'");
  }
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": bad integer value '" + v + "'");
  }
}

std::vector<std::string> parse_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i != 0) out += ",";
    out += xs[i];
  }
  return out;
}

std::string fmt_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

struct KeyDef {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define KEY_U64(key, field)                                                          \
  {key, [](RunConfig& c, const std::string& v) {                                     \
     c.field = static_cast<std::uint64_t>(parse_int(v, key));                        \
   },                                                                                \
   [](const RunConfig& c) { return std::to_string(c.field); }}
#define KEY_INT(key, field)                                                          \
  {key,                                                                              \
   [](RunConfig& c, const std::string& v) { c.field = static_cast<int>(parse_int(v, key)); }, \
   [](const RunConfig& c) { return std::to_string(c.field); }}
#define KEY_I64(key, field)                                                          \
  {key, [](RunConfig& c, const std::string& v) { c.field = parse_int(v, key); },     \
   [](const RunConfig& c) { return std::to_string(c.field); }}
#define KEY_REAL(key, field)                                                         \
  {key, [](RunConfig& c, const std::string& v) { c.field = parse_real(v, key); },    \
   [](const RunConfig& c) { return fmt_real(c.field); }}
#define KEY_BOOL(key, field)                                                         \
  {key, [](RunConfig& c, const std::string& v) { c.field = parse_bool(v, key); },    \
   [](const RunConfig& c) { return c.field ? "true" : "false"; }}
#define KEY_STR(key, field)                                                          \
  {key, [](RunConfig& c, const std::string& v) { c.field = v; },                     \
   [](const RunConfig& c) { return c.field; }}
#define KEY_LIST(key, field)                                                         \
  {key, [](RunConfig& c, const std::string& v) { c.field = parse_list(v); },         \
   [](const RunConfig& c) { return join(c.field); }}

const std::vector<KeyDef>& registry() {
  static const std::vector<KeyDef> keys = {
      KEY_U64("seed", seed),
      KEY_INT("threads", threads),
      KEY_STR("precision", precision),
      KEY_STR("out", out_dir),
      KEY_LIST("data.files", data_files),
      KEY_STR("data.columns", data_columns),
      KEY_REAL("data.unit_scale", data_unit_scale),
      KEY_REAL("data.frame_dt", data_frame_dt),
      KEY_REAL("data.radius", data_radius),
      KEY_REAL("data.mpd_horizon", data_mpd_horizon),
      KEY_BOOL("data.interpolate_gaps", data_interpolate_gaps),
      KEY_STR("data.window_cache", data_window_cache),
      KEY_STR("split.mode", split_mode),
      KEY_LIST("split.train", split_train),
      KEY_LIST("split.test", split_test),
      KEY_INT("window.T", window_T),
      KEY_INT("window.H", window_H),
      KEY_INT("window.stride", window_stride),
      KEY_INT("model.embed_dim", model_embed_dim),
      KEY_INT("model.obs_hidden", model_obs_hidden),
      KEY_INT("model.rnn_hidden", model_rnn_hidden),
      KEY_INT("model.attn_dim", model_attn_dim),
      KEY_INT("model.latent_dim", model_latent_dim),
      KEY_INT("model.head_hidden", model_head_hidden),
      KEY_REAL("model.leaky_slope", model_leaky_slope),
      KEY_REAL("model.logvar_min", model_logvar_min),
      KEY_REAL("model.logvar_max", model_logvar_max),
      KEY_STR("model.kl_mode", model_kl_mode),
      KEY_I64("train.steps", train_steps),
      KEY_INT("train.batch", train_batch),
      KEY_REAL("train.lr", train_lr),
      KEY_REAL("train.beta1", train_beta1),
      KEY_REAL("train.beta2", train_beta2),
      KEY_REAL("train.eps", train_eps),
      KEY_BOOL("train.aug_flip", train_aug_flip),
      KEY_BOOL("train.aug_rotate", train_aug_rotate),
      KEY_INT("train.log_every", train_log_every),
      KEY_INT("train.checkpoint_every", train_checkpoint_every),
      KEY_INT("eval.k", eval_k),
      KEY_BOOL("eval.fpc", eval_fpc),
      KEY_INT("eval.fpc_rate", eval_fpc_rate),
      KEY_BOOL("eval.nll", eval_nll),
      KEY_INT("eval.nll_samples", eval_nll_samples),
      KEY_STR("eval.best_mode", eval_best_mode),
      KEY_BOOL("eval.mean_only", eval_mean_only),
      KEY_U64("fpc.seed", fpc_seed),
      KEY_INT("fpc.max_iters", fpc_max_iters),
      KEY_REAL("fpc.tol", fpc_tol),
      KEY_STR("baseline.velocity", baseline_velocity),
      KEY_INT("predict.samples", predict_samples),
      KEY_INT("predict.heatmap_samples", predict_heatmap_samples),
      KEY_INT("predict.heatmap_res", predict_heatmap_res),
      KEY_INT("predict.max_windows", predict_max_windows),
      KEY_INT("latent.samples", latent_samples),
      KEY_STR("sweep.rates", sweep_rates),
  };
  return keys;
}

#undef KEY_U64
#undef KEY_INT
#undef KEY_I64
#undef KEY_REAL
#undef KEY_BOOL
#undef KEY_STR
#undef KEY_LIST

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  for (const auto& def : registry()) {
    if (key == def.name) {
      def.set(*this, trim(value));
      return;
    }
  }
  throw ConfigError("unknown config key: '" + key + "'");
}

RunConfig RunConfig::from_text(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
    }
    cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

std::string RunConfig::to_text() const {
  std::ostringstream out;
  for (const auto& def : registry()) {
    out << def.name << " = " << def.get(*this) << "\n";
  }
  return out.str();
}

model::ModelConfig RunConfig::model_config() const {
  model::ModelConfig m;
  m.embed_dim = model_embed_dim;
  m.obs_hidden = model_obs_hidden;
  m.rnn_hidden = model_rnn_hidden;
  m.attn_dim = model_attn_dim;
  m.latent_dim = model_latent_dim;
  m.head_hidden = model_head_hidden;
  m.leaky_slope = model_leaky_slope;
  m.logvar_min = model_logvar_min;
  m.logvar_max = model_logvar_max;
  m.kl_sample_mode = (model_kl_mode == "sample");
  return m;
}

data::WindowOptions RunConfig::window_options() const {
  data::WindowOptions w;
  w.T = window_T;
  w.H = window_H;
  w.stride = window_stride;
  w.radius = data_radius;
  w.mpd_horizon = data_mpd_horizon;
  return w;
}

data::ParseOptions RunConfig::parse_options() const {
  data::ParseOptions p;
  p.columns = data::parse_column_order(data_columns);
  p.unit_scale = data_unit_scale;
  p.frame_dt = data_frame_dt;
  p.interpolate_gaps = data_interpolate_gaps;
  return p;
}

std::vector<int> RunConfig::sweep_rate_list() const {
  std::vector<int> out;
  for (const auto& tok : parse_list(sweep_rates)) {
    const auto dash = tok.find('-');
    if (dash != std::string::npos && dash > 0) {
      const int lo = static_cast<int>(parse_int(tok.substr(0, dash), "sweep.rates"));
      const int hi = static_cast<int>(parse_int(tok.substr(dash + 1), "sweep.rates"));
      if (lo < 1 || hi < lo) throw ConfigError("sweep.rates: bad range '" + tok + "'");
      for (int r = lo; r <= hi; ++r) out.push_back(r);
    } else {
      out.push_back(static_cast<int>(parse_int(tok, "sweep.rates")));
    }
  }
  if (out.empty()) throw ConfigError("sweep.rates: empty");
  for (int r : out) {
    if (r < 1 || r > 50) throw ConfigError("sweep.rates: rate must lie in [1, 50]");
  }
  return out;
}

void RunConfig::validate() const {
  if (precision != "f32" && precision != "f64") {
    throw ConfigError("precision must be f32 or f64");
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (window_T < 2) throw ConfigError("window.T must be >= 2");
  if (window_H < 1) throw ConfigError("window.H must be >= 1");
  if (window_stride < 1) throw ConfigError("window.stride must be >= 1");
  if (split_mode != "fixed" && split_mode != "loo") {
    throw ConfigError("split.mode must be fixed or loo");
  }
  if (model_kl_mode != "closed" && model_kl_mode != "sample") {
    throw ConfigError("model.kl_mode must be closed or sample");
  }
  if (eval_best_mode != "independent" && eval_best_mode != "joint") {
    throw ConfigError("eval.best_mode must be independent or joint");
  }
  if (baseline_velocity != "mean" && baseline_velocity != "last") {
    throw ConfigError("baseline.velocity must be mean or last");
  }
  if (eval_k < 1) throw ConfigError("eval.k must be >= 1");
  if (eval_fpc_rate < 1 || eval_fpc_rate > 50) {
    throw ConfigError("eval.fpc_rate must lie in [1, 50]");
  }
  if (eval_nll_samples < 2) throw ConfigError("eval.nll_samples must be >= 2");
  if (train_batch < 1) throw ConfigError("train.batch must be >= 1");
  if (train_steps < 0) throw ConfigError("train.steps must be >= 0");
  if (data_frame_dt <= 0) throw ConfigError("data.frame_dt must be > 0");
  if (data_mpd_horizon <= 0) throw ConfigError("data.mpd_horizon must be > 0");
  if (model_logvar_min >= model_logvar_max) {
    throw ConfigError("model.logvar_min must be below model.logvar_max");
  }
}

}  // namespace svae::app
