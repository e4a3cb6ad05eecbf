#include "lyk/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "lyk/algebra.hpp"
#include "lyk/dynamics.hpp"
#include "lyk/enumscale.hpp"
#include "lyk/errors.hpp"
#include "lyk/kneading.hpp"
#include "lyk/pairlab.hpp"
#include "lyk/tower.hpp"

namespace lyk::cli {

namespace {

constexpr int kDigits = 17;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", kDigits, v);
  return buf;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------- records

class Emitter {
 public:
  explicit Emitter(std::ostream& os) : os_(os) {}

  struct Field {
    std::string key, value;
    Field(std::string k, std::string v) : key(std::move(k)), value(std::move(v)) {}
    Field(std::string k, const char* v) : key(std::move(k)), value(v) {}
    Field(std::string k, double v) : key(std::move(k)), value(num(v)) {}
    Field(std::string k, long v) : key(std::move(k)), value(std::to_string(v)) {}
    Field(std::string k, int v) : key(std::move(k)), value(std::to_string(v)) {}
    Field(std::string k, std::size_t v) : key(std::move(k)), value(std::to_string(v)) {}
    Field(std::string k, const BigInt& v) : key(std::move(k)), value(v.str()) {}
  };

  void record(const std::string& type, std::initializer_list<Field> fields) {
    record(type, std::vector<Field>(fields));
  }
  void record(const std::string& type, const std::vector<Field>& fields) {
    os_ << type;
    for (const auto& f : fields) field(f);
    if (type == "summary") {
      field({"digits", kDigits});
      for (const auto& f : config_) field({"config." + f.key, f.value});
    }
    os_ << '\n';
  }
  void config(const std::string& key, const std::string& value) {
    os_ << "#config " << key << " = " << value << '\n';
    config_.emplace_back(key, value);
  }

 private:
  void field(const Field& f) {
    os_ << ' ' << f.key << '=';
    if (f.value.empty() || f.value.find_first_of(" \t\"") != std::string::npos) {
      os_ << '"';
      for (char ch : f.value) os_ << (ch == '"' ? '\'' : ch);
      os_ << '"';
    } else {
      os_ << f.value;
    }
  }
  std::ostream& os_;
  std::vector<Field> config_;
};

// ---------------------------------------------------------------- settings

struct Key {
  const char* name;
  const char* fallback;
  const char* help;
};

class Settings {
 public:
  Settings(std::map<std::string, std::string> values, long default_bits, int threads)
      : values_(std::move(values)), default_bits_(default_bits), threads_(threads) {}

  const std::string& str(const std::string& key) const { return values_.at(key); }
  bool is(const std::string& key, const char* word) const { return str(key) == word; }
  int threads() const { return threads_; }
  long default_bits() const { return default_bits_; }

  long integer(const std::string& key, long lo, long hi) const {
    const std::string& v = str(key);
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || out < lo || out > hi)
      throw InputError("--" + key + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "], got '" + v + "'");
    return out;
  }

  double real(const std::string& key, double lo, double hi) const {
    const std::string& v = str(key);
    char* end = nullptr;
    const double out = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !(out >= lo && out <= hi))
      throw InputError("--" + key + ": expected a number in [" + num(lo) + ", " + num(hi) + "], got '" + v + "'");
    return out;
  }

  std::uint64_t seed(const std::string& key) const {
    const std::string& v = str(key);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
      throw InputError("--" + key + ": expected a non-negative integer, got '" + v + "'");
    return out;
  }

  bool flag(const std::string& key) const {
    if (is(key, "yes")) return true;
    if (is(key, "no")) return false;
    throw InputError("--" + key + ": expected yes or no, got '" + str(key) + "'");
  }

  QRule rule(const std::string& key) const {
    try {
      return QRule::parse(str(key));
    } catch (const InputError& e) {
      throw InputError("--" + key + ": " + e.what());
    }
  }

  UnimodalMap map(const std::string& key = "map") const {
    if (str(key).empty()) throw InputError("--" + key + " is required");
    try {
      return UnimodalMap::parse(str(key), default_bits_);
    } catch (const InputError& e) {
      throw InputError("--" + key + ": " + e.what());
    } catch (const RangeError& e) {
      throw InputError("--" + key + ": " + e.what());
    }
  }

  std::vector<Interval> intervals(const std::string& key) const {
    std::vector<Interval> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto colon = item.find(':');
      char* e1 = nullptr;
      char* e2 = nullptr;
      if (colon == std::string::npos) throw InputError("--" + key + ": expected lo:hi[,lo:hi...], got '" + item + "'");
      std::string a = trim(item.substr(0, colon)), b = trim(item.substr(colon + 1));
      Interval iv{std::strtod(a.c_str(), &e1), std::strtod(b.c_str(), &e2)};
      if (a.empty() || b.empty() || *e1 || *e2 || !(iv.lo < iv.hi))
        throw InputError("--" + key + ": bad interval '" + item + "'");
      out.push_back(iv);
    }
    if (out.empty()) throw InputError("--" + key + ": no intervals given");
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  long default_bits_;
  int threads_;
};

// A map, optionally re-tuned to a kneading rule at its own family, ell and bits.
// Re-throws a library error with the responsible parameter named.
template <class Fn>
auto blame(const std::string& params, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PrecisionError& e) {
    throw PrecisionError(params + ": " + e.what());
  } catch (const HypothesisError& e) {
    throw HypothesisError(params + ": " + e.what());
  } catch (const DegenerateError& e) {
    throw DegenerateError(params + ": " + e.what());
  } catch (const RangeError& e) {
    throw RangeError(params + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(params + ": " + e.what());
  }
}

UnimodalMap resolve_map(const Settings& s) {
  UnimodalMap f = s.map();
  if (s.is("tune-q", "none")) return f;
  const int depth = static_cast<int>(s.integer("tune-depth", 1, 40));
  auto target = KneadingData::build(s.rule("tune-q"), depth + 1);
  return blame("--tune-q/--tune-depth (map bits)",
               [&] { return f.with_parameter(tune_parameter(f.family(), f.ell(), target, depth, f.bits()).mid); });
}

double resolve_rho(const Settings& s, const std::string& key) {
  const std::string& v = s.str(key);
  if (v.rfind("d=", 0) == 0) {
    Settings tmp({{key, v.substr(2)}}, s.default_bits(), 1);
    return static_cast<double>(leading_root(static_cast<int>(tmp.integer(key, 1, 64)), 1e-18L).mid());
  }
  return s.real(key, 1, 2);
}

// ---------------------------------------------------------------- commands

using Handler = std::function<void(const Settings&, Emitter&)>;

struct Command {
  std::string name;
  std::string description;
  std::vector<Key> keys;
  Handler handler;
};

void cmd_cutting_times(const Settings& s, Emitter& out) {
  KneadingData kd;
  if (!s.str("q-file").empty()) {
    std::ifstream in(s.str("q-file"));
    if (!in) throw InputError("--q-file: cannot read '" + s.str("q-file") + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      kd = parse_kneading_text(buf.str());
    } catch (const InputError& e) {
      throw InputError(std::string("--q-file: ") + e.what());
    }
  } else {
    const int depth = static_cast<int>(s.integer("depth", 0, 100000));
    kd = blame("--q/--depth", [&] { return KneadingData::build(s.rule("q"), depth); });
  }
  for (int k = 0; k <= kd.depth(); ++k)
    out.record("S", {{"k", k}, {"Q", k == 0 ? std::string("-") : std::to_string(kd.Q(k))}, {"S", kd.S(k)}});
  const int horizon = static_cast<int>(std::min<long>(s.integer("horizon", 1, 100000), kd.depth()));
  auto verdict = is_renormalizable(kd, horizon);
  out.record("summary", {{"command", "cutting-times"},
                         {"name", kd.name()},
                         {"count", kd.depth() + 1},
                         {"max_gap", kd.depth() > 0 ? kd.max_gap() : 0},
                         {"renormalizable", yes_no(verdict.renormalizable)},
                         {"note", verdict.note()}});
}

void cmd_enumscale(const Settings& s, Emitter& out) {
  const QRule rule = s.rule("q");
  auto kd = std::make_shared<const KneadingData>(KneadingData::build(rule, static_cast<int>(s.integer("depth", 1, 2000))));
  const long from = s.integer("from", 0, 1L << 62), to = s.integer("to", 0, 1L << 62);
  if (to < from) throw InputError("--to: must be >= --from");
  if (BigInt(to) >= kd->S(kd->depth()))
    throw InputError("--to: must be below S_depth = " + kd->S(kd->depth()).str() + "; raise --depth");
  std::optional<FpTable> table;
  std::string rho_text = s.str("rho");
  if (rho_text == "auto" && rule.tail_offset() && rule.table().empty())
    table = blame("--rho/--depth", [&] {
      return fp_table(*kd, rho_from_polynomial(cutting_time_polynomial(*rule.tail_offset())), kd->depth());
    });
  else if (rho_text != "auto" && rho_text != "none")
    table = blame("--rho/--depth", [&] { return fp_table(*kd, rho_from_decimal(rho_text), kd->depth()); });
  for (long n = from; n <= to; ++n) {
    EnumSequence e = encode(BigInt(n), kd);
    std::string next;
    try {
      next = add_one(e).to_string();
    } catch (const RangeError&) {
      next = "overflow";
    }
    std::vector<Emitter::Field> f{{"n", n},
                                  {"digits", e.to_string()},
                                  {"admissible", yes_no(e.is_admissible() && e.partial_sums_bounded())},
                                  {"decoded", decode(e)},
                                  {"next", next}};
    if (table) f.emplace_back("pi", project(e, *table, kd->depth()).point);
    out.record("enum", f);
  }
  out.record("summary", {{"command", "enumscale"},
                         {"name", kd->name()},
                         {"depth", kd->depth()},
                         {"count", to - from + 1},
                         {"projection", table ? "yes" : "no"},
                         {"fp_bits", table ? table->bits : 0L}});
}

void cmd_pisot(const Settings& s, Emitter& out) {
  const int d = static_cast<int>(s.integer("d", 1, 64));
  const IntPoly p = cutting_time_polynomial(d);
  auto rep = is_pisot_driven(p, static_cast<long double>(s.real("margin", 0, 0.5)));
  auto root = [&](const char* role, const RootDisc& r) {
    out.record("root", {{"role", role},
                        {"re", static_cast<double>(r.center.real())},
                        {"im", static_cast<double>(r.center.imag())},
                        {"modulus_lo", static_cast<double>(r.modulus_lo())},
                        {"modulus_hi", static_cast<double>(r.modulus_hi())}});
  };
  root("leading", rep.leading);
  for (const auto& r : rep.others) root("conjugate", r);
  for (const auto& c : rep.cyclotomic_factors) out.record("factor", {{"kind", "cyclotomic"}, {"poly", c.to_string()}});
  if (!rep.cyclotomic_factors.empty()) out.record("factor", {{"kind", "cofactor"}, {"poly", rep.cofactor.to_string()}});
  std::vector<Emitter::Field> summary{{"command", "pisot"},
                                      {"polynomial", p.to_string()},
                                      {"pisot", yes_no(rep.pisot)},
                                      {"unit_modulus_roots", rep.unit_modulus_roots},
                                      {"note", rep.note}};
  const long k_max = s.integer("k-max", 0, 5000);
  if (k_max > 0) {
    const int B = s.is("b", "auto") ? d : static_cast<int>(s.integer("b", 0, 1000));
    auto kd = KneadingData::build(QRule::fibonacci_like(d), static_cast<int>(k_max));
    auto dec = blame("--b/--k-max", [&] { return decay_diagnostics(kd, rho_from_polynomial(p), B, static_cast<int>(k_max)); });
    for (const auto& r : dec.rows)
      out.record("decay", {{"k", r.k}, {"window_max", r.window_max}, {"term", r.term}, {"partial_sum", r.partial_sum}});
    summary.emplace_back("decay_verdict", to_string(dec.verdict));
    summary.emplace_back("rate", dec.rate);
    summary.emplace_back("test_window_min", dec.test_window_min);
  }
  out.record("summary", summary);
}

void cmd_tune(const Settings& s, Emitter& out) {
  const std::string fam = s.str("family");
  if (fam != "logistic" && fam != "symmetric") throw InputError("--family: expected logistic or symmetric");
  const int depth = static_cast<int>(s.integer("depth", 1, 40));
  const long bits = s.is("bits", "auto") ? s.default_bits() : s.integer("bits", 53, 1L << 16);
  auto target = KneadingData::build(s.rule("q"), depth + 1);
  auto res = blame("--depth/--bits", [&] {
    return tune_parameter(fam == "logistic" ? Family::logistic : Family::symmetric, s.real("ell", 1, 64), target, depth,
                          bits);
  });
  for (int k = 0; k <= res.verified.depth(); ++k) out.record("S", {{"k", k}, {"S", res.verified.S(k)}});
  UnimodalMap f(fam == "logistic" ? Family::logistic : Family::symmetric, res.mid, s.real("ell", 1, 64));
  out.record("summary", {{"command", "tune"},
                         {"lo", res.lo.to_string()},
                         {"hi", res.hi.to_string()},
                         {"mid", res.mid.to_string()},
                         {"steps", res.steps},
                         {"prefix_length", res.prefix_length},
                         {"map", f.to_spec()}});
}

void cmd_tower(const Settings& s, Emitter& out) {
  const UnimodalMap f = resolve_map(s);
  const long steps = s.integer("steps", 1, 100000000);
  const long n_max = s.is("n-max", "auto") ? steps + 1 : s.integer("n-max", 1, 100000000);
  const auto lv = blame("--map/--n-max", [&] { return build_levels(f, n_max); });
  Real x(0L, f.bits());
  try {
    x = Real::parse(s.str("x"), f.bits());
  } catch (const InputError& e) {
    throw InputError(std::string("--x: ") + e.what());
  }
  const auto t = blame("--steps/--n-max", [&] { return lift(lv, x, steps); });
  if (s.flag("trace"))
    for (long j = 1; j <= t.N(); ++j)
      out.record("level", {{"j", j},
                           {"level", t.level[static_cast<std::size_t>(j)]},
                           {"branch", to_string(t.branch[static_cast<std::size_t>(j)])}});
  const auto bad = check_transitions(t, lv.kneading(), lv.n_max());
  const auto chi = chi_hat(t, lv.kneading(), lv.n_max());
  std::vector<Emitter::Field> summary{{"command", "tower"},
                                      {"map", f.to_spec()},
                                      {"steps", steps},
                                      {"max_level", *std::max_element(t.level.begin() + 1, t.level.end())},
                                      {"ties", t.ties},
                                      {"restarts", t.restarts},
                                      {"outside", t.outside},
                                      {"transitions", bad ? "violated at j=" + std::to_string(*bad) : std::string("ok")},
                                      {"chi_states", chi.state.size()},
                                      {"markov", yes_no(chi_hat_is_markov(chi, lv.kneading()))}};
  if (!s.is("rho", "none")) {
    const double rho = resolve_rho(s, "rho");
    auto rep = pi_tilde(t, rho, cutting_successor_levels(lv.kneading(), 0, n_max), s.real("cauchy", 1e-12, 0.5));
    for (const auto& v : rep.values)
      out.record("pi", {{"n", v.n}, {"b", v.b}, {"provisional", yes_no(v.provisional)}, {"value", v.value}});
    summary.emplace_back("pi_estimate", rep.estimate);
    summary.emplace_back("stabilized", yes_no(rep.stabilized));
    summary.emplace_back("residual", rep.residual);
  }
  out.record("summary", summary);
}

void cmd_drift(const Settings& s, Emitter& out) {
  const UnimodalMap f = resolve_map(s);
  const long steps = s.integer("steps", 1, 100000000);
  const long n_max = s.is("n-max", "auto") ? steps + 1 : s.integer("n-max", 1, 100000000);
  const auto lv = blame("--map/--n-max", [&] { return build_levels(f, n_max); });
  auto d = blame("--steps/--n-max", [&] {
    return drift(lv, static_cast<int>(s.integer("samples", 1, 1000000)), steps, s.seed("seed"), s.threads());
  });
  for (const auto& b : d.bins)
    out.record("drift", {{"k", b.k}, {"mean", b.mean}, {"second_moment", b.second_moment}, {"count", b.count}});
  std::string inc;
  for (int v : d.increments_seen) inc += (inc.empty() ? "" : ",") + std::to_string(v);
  out.record("summary", {{"command", "drift"},
                         {"map", f.to_spec()},
                         {"transitions", d.transitions},
                         {"mean", d.mean},
                         {"ci_half_width", d.ci_half_width},
                         {"verdict", to_string(d.verdict)},
                         {"increments", inc}});
}

void cmd_loops(const Settings& s, Emitter& out) {
  auto kd = KneadingData::build(s.rule("q"), static_cast<int>(s.integer("depth", 2, 5000)));
  const int kappa = static_cast<int>(s.integer("kappa", 0, 5000));
  const int kappa_hat = static_cast<int>(s.integer("kappa-hat", 0, 5000));
  const int bound = static_cast<int>(s.integer("search-bound", 1, 5000));
  auto lp = blame("--q/--kappa/--kappa-hat", [&] { return synthesize_loops(kd, kappa, kappa_hat, bound); });
  auto edges = [&](const char* name, const std::vector<LoopEdge>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.record("edge", {{"loop", name}, {"index", i}, {"from", v[i].from}, {"to", v[i].to}, {"cost", v[i].cost}});
  };
  edges("A", lp.loop_a);
  edges("B", lp.loop_b);
  out.record("summary", {{"command", "loops"},
                         {"name", kd.name()},
                         {"length_a", lp.length_a},
                         {"length_b", lp.length_b},
                         {"equal", yes_no(lp.length_a == lp.length_b)}});
}

void cmd_classify_pairs(const Settings& s, Emitter& out) {
  const UnimodalMap f = s.map();
  ClassifyParams p;
  p.window = s.integer("window", 2, 1000000000);
  p.burn_in = s.integer("burn-in", 0, p.window - 1);
  p.eps = s.is("eps", "auto") ? 0.45 * f.diameter() : s.real("eps", 1e-12, f.diameter());
  p.delta_min = s.real("delta-min", 1e-300, f.diameter());
  p.precision = static_cast<int>(s.integer("precision", 53, 113));
  if (p.precision != 53 && p.precision != 113) throw InputError("--precision: expected 53 or 113");
  auto est = measure_estimate(f, s.integer("pairs", 1, 100000000), s.seed("seed"), p, s.threads());
  for (const auto& r : est.records)
    out.record("pair", {{"index", r.index},
                        {"label", r.verdict.describe()},
                        {"min_gap", r.verdict.min_gap},
                        {"max_gap", r.verdict.max_gap},
                        {"x", r.x},
                        {"y", r.y}});
  std::vector<Emitter::Field> summary{{"command", "classify-pairs"}, {"map", f.to_spec()}, {"pairs", est.pairs},
                                      {"eps", p.eps}};
  for (const auto& l : est.labels) {
    std::string name = to_string(l.label);
    summary.emplace_back(name, l.fraction);
    summary.emplace_back(name + "_wilson", num(l.wilson_lo) + ":" + num(l.wilson_hi));
  }
  out.record("summary", summary);
}

void cmd_limsup_full(const Settings& s, Emitter& out) {
  const UnimodalMap f = s.map();
  const auto A = s.intervals("a");
  const int n_max = static_cast<int>(s.integer("n-max", 0, 100000));
  const auto cap = static_cast<std::size_t>(s.integer("cap", 1, 100000000));
  auto rows = blame("--a", [&] { return limsup_full_estimate(f, A, n_max, cap); });
  for (const auto& r : rows)
    out.record("push", {{"n", r.n},
                        {"lower", r.lower},
                        {"upper", r.upper},
                        {"running_max", r.running_max},
                        {"components", r.components},
                        {"capped", yes_no(r.capped)}});
  out.record("summary", {{"command", "limsup-full"},
                         {"map", f.to_spec()},
                         {"running_max", rows.back().running_max},
                         {"final_lower", rows.back().lower},
                         {"final_upper", rows.back().upper}});
}

void cmd_entry_map(const Settings& s, Emitter& out) {
  const UnimodalMap f = resolve_map(s);
  std::vector<OpenInterval> U;
  for (const auto& iv : s.intervals("u")) U.push_back({iv.lo, iv.hi});
  const long points = s.integer("points", 1, 10000000);
  std::vector<double> xs;
  for (long i = 0; i < points; ++i)
    xs.push_back(f.lo_d() + f.diameter() * (static_cast<double>(i) + 0.5) / static_cast<double>(points));
  const long horizon = s.integer("horizon", 1, 100000000);
  auto rep = blame("--u", [&] { return first_entry_map(f, U, xs, horizon); });
  for (const auto& p : rep.points)
    out.record("entry", {{"x", p.x},
                         {"r", p.r ? std::to_string(*p.r) : std::string("none")},
                         {"image", p.image},
                         {"derivative", p.derivative},
                         {"branch", p.branch}});
  for (std::size_t i = 0; i < rep.branches.size(); ++i) {
    const auto& b = rep.branches[i];
    out.record("branch", {{"index", i}, {"r", b.r}, {"itinerary", b.itinerary}, {"samples", b.samples},
                          {"distortion", b.distortion}});
  }
  out.record("summary", {{"command", "entry-map"},
                         {"map", f.to_spec()},
                         {"points", points},
                         {"no_entry", rep.no_entry},
                         {"branches", rep.branches.size()},
                         {"boundary_reentries", rep.boundary_reentries}});
}

const std::vector<Command>& commands() {
  static const std::vector<Key> map_keys{{"map", "", "map spec, e.g. \"family:logistic a:3.9 bits:256\""},
                                         {"tune-q", "none", "re-tune the map's a to this kneading rule"},
                                         {"tune-depth", "20", "tuning depth"}};
  auto with_map = [&](std::vector<Key> extra) {
    std::vector<Key> k = map_keys;
    k.insert(k.end(), extra.begin(), extra.end());
    return k;
  };
  static const std::vector<Command> cmds{
      {"cutting-times",
       "cutting times S_k and the kneading map Q",
       {{"q", "fib", "kneading rule: fib, feigenbaum, doubled, d=<n>"},
        {"depth", "10", "largest index k"},
        {"q-file", "", "tabulated '#kneading v1' file instead of --q"},
        {"horizon", "50", "renormalization search horizon"}},
       cmd_cutting_times},
      {"enumscale",
       "greedy digits, odometer successor and circle projection",
       {{"q", "fib", "kneading rule"},
        {"depth", "20", "truncation length"},
        {"from", "0", "first integer"},
        {"to", "20", "last integer"},
        {"rho", "auto", "rotation number: auto, none or a decimal"}},
       cmd_enumscale},
      {"pisot",
       "roots of x^d - x^(d-1) - 1, Pisot verdict and decay diagnostics",
       {{"d", "2", "recursion offset"},
        {"margin", "1e-9", "modulus margin below 1"},
        {"k-max", "0", "decay diagnostics up to k (0 skips)"},
        {"b", "auto", "window offset B (auto = d)"}},
       cmd_pisot},
      {"tune",
       "bisect the parameter to a target kneading map",
       {{"family", "logistic", "logistic or symmetric"},
        {"ell", "2", "critical order"},
        {"q", "fib", "target kneading rule"},
        {"depth", "12", "match cutting times through this index"},
        {"bits", "auto", "precision (auto = LYK_BITS or 256)"}},
       cmd_tune},
      {"tower",
       "lift one orbit to the Hofbauer tower",
       with_map({{"x", "0.3", "starting point"},
                 {"steps", "1000", "trace length N"},
                 {"n-max", "auto", "levels scanned (auto = steps + 1)"},
                 {"rho", "none", "pi~ rotation number: none, d=<n> or a decimal"},
                 {"cauchy", "1e-3", "pi~ stabilization threshold"},
                 {"trace", "yes", "emit one record per step"}}),
       cmd_tower},
      {"drift",
       "conditional increments of the induced-map level",
       with_map({{"samples", "20", "random starting points"},
                 {"steps", "2000", "trace length per point"},
                 {"n-max", "auto", "levels scanned (auto = steps + 1)"},
                 {"seed", "1", "master seed"}}),
       cmd_drift},
      {"loops",
       "two loops through E_kappa and E_kappa_hat of equal length",
       {{"q", "fib", "kneading rule"},
        {"depth", "60", "kneading depth"},
        {"kappa", "3", "first state"},
        {"kappa-hat", "4", "second state"},
        {"search-bound", "32", "levels searched above max(kappa, kappa_hat)"}},
       cmd_loops},
      {"classify-pairs",
       "Monte Carlo labels of random pairs",
       {{"map", "", "map spec"},
        {"pairs", "1000", "number of pairs"},
        {"seed", "1", "master seed"},
        {"window", "100000", "iterates per pair"},
        {"burn-in", "1000", "iterates skipped"},
        {"eps", "auto", "Li-Yorke threshold (auto = 0.45 diam I)"},
        {"delta-min", "1e-3", "proximality threshold"},
        {"precision", "53", "53 or 113 bits"}},
       cmd_classify_pairs},
      {"limsup-full",
       "exact interval pushforward of a union A",
       {{"map", "", "map spec"},
        {"a", "0.3:0.31", "intervals lo:hi[,lo:hi...]"},
        {"n-max", "30", "number of pushes"},
        {"cap", "10000", "component cap"}},
       cmd_limsup_full},
      {"entry-map",
       "first entry times and branch distortion for a union U",
       with_map({{"u", "0.49:0.51", "open intervals lo:hi[,lo:hi...]"},
                 {"points", "100", "grid points over I"},
                 {"horizon", "1000", "largest entry time"}}),
       cmd_entry_map},
  };
  return cmds;
}

int fail(std::ostream& err, const std::string& cmd, int code, const std::string& what) {
  err << "lyk" << (cmd.empty() ? "" : " " + cmd) << ": error: " << what << '\n';
  return code;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  // A saved output file: only its #config header counts.
  const bool saved = text.rfind("#config ", 0) == 0 || text.find("\n#config ") != std::string::npos;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.rfind("#config ", 0) == 0)
      line = trim(line.substr(8));
    else if (saved || line.empty() || line[0] == '#')
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(no) + ": empty key");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Li-Yorke pair analysis for unimodal interval maps", "lyk"};
  std::string config_path, output_path, threads_text;
  app.add_option("--config", config_path, "settings file of 'key = value' lines; flags override it");
  app.add_option("--output", output_path, "write records to this file instead of stdout");
  app.add_option("--threads", threads_text, "worker threads for sampling (default: all cores)");
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.description);
    sub->fallthrough();
    for (const auto& k : c.keys)
      opts[c.name][k.name] =
          sub->add_option(std::string("--") + k.name, given[c.name][k.name],
                          std::string(k.help) + (std::string(k.fallback).empty() ? "" : " [" + std::string(k.fallback) + "]"));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : input_error;
  }

  std::string name;
  try {
    long default_bits = UnimodalMap::kDefaultBits;
    if (const char* env = std::getenv("LYK_BITS")) {
      Settings tmp({{"LYK_BITS", env}}, default_bits, 1);
      default_bits = tmp.integer("LYK_BITS", 53, 1L << 16);
    }

    std::map<std::string, std::string> file;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw InputError("--config: cannot read '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      file = parse_config_text(buf.str());
    }
    if (!app.get_subcommands().empty()) name = app.get_subcommands().front()->get_name();
    if (file.count("command")) {
      if (name.empty()) name = file["command"];
      if (file["command"] != name)
        throw InputError("--config: command '" + file["command"] + "' does not match '" + name + "'");
      file.erase("command");
    }
    if (name.empty()) throw InputError("no subcommand given (try --help)");
    const Command* cmd = nullptr;
    for (const auto& c : commands())
      if (c.name == name) cmd = &c;
    if (!cmd) throw InputError("unknown command '" + name + "'");

    std::map<std::string, std::string> values;
    for (const auto& k : cmd->keys) values[k.name] = k.fallback;
    for (const auto& [k, v] : file) {
      if (k == "threads") {
        if (threads_text.empty()) threads_text = v;
      } else if (k == "output") {
        if (output_path.empty()) output_path = v;
      } else if (!values.count(k)) {
        throw InputError("--config: unknown key '" + k + "' for " + name);
      } else {
        values[k] = v;
      }
    }
    for (const auto& [k, opt] : opts[name])
      if (opt->count() > 0) values[k] = given[name][k];

    int threads = 0;
    if (!threads_text.empty()) {
      Settings tmp({{"threads", threads_text}}, default_bits, 1);
      threads = static_cast<int>(tmp.integer("threads", 0, 4096));
    }

    std::ostringstream buf;
    Emitter em(buf);
    em.config("command", name);
    for (const auto& k : cmd->keys) em.config(k.name, values[k.name]);
    cmd->handler(Settings(values, default_bits, threads), em);

    if (output_path.empty()) {
      out << buf.str();
    } else {
      std::ofstream file_out(output_path, std::ios::binary);
      if (!file_out) throw InputError("--output: cannot write '" + output_path + "'");
      file_out << buf.str();
    }
    return ok;
  } catch (const PrecisionError& e) {
    return fail(err, name, precision_error, e.what());
  } catch (const Error& e) {
    return fail(err, name, input_error, e.what());
  } catch (const std::exception& e) {
    return fail(err, name, internal, e.what());
  }
}

}  // namespace lyk::cli
