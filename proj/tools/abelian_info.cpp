#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "abelian/algebra.hpp"
#include "abelian/channel.hpp"
#include "abelian/errors.hpp"
#include "abelian/information.hpp"
#include "abelian/probability.hpp"
#include "abelian/state.hpp"
#include "abelian/tensor.hpp"
#include "report.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr std::int64_t kSchemaVersion = 1;

struct Global {
  std::string format = "json";
  std::string out_path;
  std::uint64_t seed = 0;
  unsigned budget = 24;
  bool renormalize = false;

  abelian::Budget make_budget() const { return abelian::Budget{budget}; }
};

struct Meta {
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;

  void echo(std::string key, std::string value) { config.emplace_back(std::move(key), std::move(value)); }
  void echo(std::string key, double value) { echo(std::move(key), report::fmt_double(value)); }
  void echo_uint(std::string key, std::uint64_t value) { echo(std::move(key), std::to_string(value)); }
};

void write_meta(report::JsonWriter& j, const Meta& m) {
  j.field("tool_version", kVersion);
  j.key("schema_version");
  j.value_int(kSchemaVersion);
  j.field("command", m.command);
  j.field_uint("seed", m.seed);
  j.key("config");
  j.begin_object();
  for (const auto& [k, v] : m.config) j.field(k, v);
  j.end_object();
}

void write_meta(report::CsvWriter& c, const Meta& m) {
  c.line("tool_version", kVersion);
  c.line_uint("schema_version", std::uint64_t(kSchemaVersion));
  c.line("command", m.command);
  c.line_uint("seed", m.seed);
  for (const auto& [k, v] : m.config) c.line("config." + k, v);
}

void emit(const std::string& text, const Global& g) {
  if (g.out_path.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    std::fputc('\n', stdout);
    return;
  }
  std::ofstream f(g.out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw abelian::ValidationError("cannot write output file: " + g.out_path);
  f << text << '\n';
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  std::vector<double> out;
  for (const std::string& p : split(csv, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(p, &pos));
      if (pos != p.size()) throw std::invalid_argument(p);
    } catch (const std::exception&) {
      throw abelian::ValidationError(std::string(what) + ": '" + p + "' is not a number");
    }
  }
  return out;
}

template <typename T>
std::vector<T> parse_integers(const std::string& csv, const char* what) {
  std::vector<T> out;
  for (const std::string& p : split(csv, ',')) {
    try {
      std::size_t pos = 0;
      const unsigned long long v = std::stoull(p, &pos);
      if (pos != p.size()) throw std::invalid_argument(p);
      out.push_back(T(v));
    } catch (const std::exception&) {
      throw abelian::ValidationError(std::string(what) + ": '" + p + "' is not a nonnegative integer");
    }
  }
  return out;
}

abelian::State make_state(const std::string& probs_csv, const Global& g, const char* what) {
  std::vector<double> w = parse_doubles(probs_csv, what);
  const abelian::Algebra alg(w.size());
  return abelian::State(alg, std::move(w), g.renormalize);
}

abelian::PrefixString parse_digits(const std::string& s, std::size_t dim, const char* what) {
  abelian::PrefixString out;
  out.reserve(s.size());
  for (char c : s) {
    if (c < '0' || c > '9') {
      throw abelian::ValidationError(std::string(what) + ": '" + s + "' must be a digit string");
    }
    const auto v = std::uint32_t(c - '0');
    if (v >= dim) {
      throw abelian::ValidationError(std::string(what) + ": digit " + std::to_string(v) +
                                     " outside alphabet of size " + std::to_string(dim));
    }
    out.push_back(v);
  }
  return out;
}

std::string digits_to_string(const abelian::PrefixString& s) {
  std::string out;
  out.reserve(s.size());
  for (std::uint32_t v : s) {
    if (v > 9) return "";  // non-decimal alphabets have no digit rendering
    out += char('0' + v);
  }
  return out;
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw abelian::ValidationError("cannot open file: " + path);
  return nlohmann::json::parse(f);
}

abelian::Code load_code(const std::string& path) {
  const nlohmann::json doc = load_json(path);
  const auto code_dim = doc.at("code_dim").get<std::size_t>();
  std::vector<abelian::PrefixString> words;
  for (const auto& w : doc.at("codewords")) {
    words.push_back(parse_digits(w.get<std::string>(), code_dim, "codeword"));
  }
  return abelian::Code(code_dim, std::move(words));
}

abelian::Channel load_channel(const nlohmann::json& doc) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : doc.at("rows")) rows.push_back(row.get<std::vector<double>>());
  return abelian::Channel(std::move(rows));
}

abelian::Channel load_channel_file(const std::string& path) { return load_channel(load_json(path)); }

std::uint64_t pow_u64(std::size_t d, unsigned k, const char* what) {
  if (double(k) * std::log2(double(d)) > 62.0) {
    throw abelian::BudgetError(std::string(what) + ": d^k does not fit a 64-bit index");
  }
  std::uint64_t out = 1;
  for (unsigned i = 0; i < k; ++i) out *= d;
  return out;
}

abelian::CodebookPolicy parse_policy(const std::string& name) {
  if (name == "uniform") return abelian::CodebookPolicy::UniformWithoutReplacement;
  if (name == "lexicographic") return abelian::CodebookPolicy::LexicographicFirst;
  if (name == "supplied") return abelian::CodebookPolicy::Supplied;
  throw abelian::ValidationError("unknown codebook policy: " + name);
}

// ---- subcommand runners ------------------------------------------------

struct EntropyOpts {
  std::string probs;
};

void run_entropy(const EntropyOpts& o, const Global& g) {
  const abelian::State omega = make_state(o.probs, g, "--probs");
  const double h = abelian::shannon_entropy(omega);
  Meta m{"entropy", g.seed, {}};
  m.echo("probs", o.probs);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("entropy_bits", h);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("entropy_bits", h);
  j.end_object();
  emit(j.str(), g);
}

struct CdfOpts {
  std::string probs, coeffs;
  double t = 0.0;
  unsigned steps = 0;
};

void run_cdf(const CdfOpts& o, const Global& g) {
  const abelian::State omega = make_state(o.probs, g, "--probs");
  const std::vector<double> a = parse_doubles(o.coeffs, "--coeffs");
  if (a.size() != omega.dim()) {
    throw abelian::ValidationError("--coeffs must match --probs in length");
  }
  std::vector<abelian::cplx> coeffs(a.begin(), a.end());
  const abelian::Element x(omega.algebra(), std::move(coeffs));
  const double value = abelian::cdf_at(omega, x, o.t);
  const double strict = abelian::cdf_at_strict(omega, x, o.t);
  const abelian::Cdf full = abelian::cdf(omega, x);
  std::vector<double> diag;
  if (o.steps > 0) diag = abelian::cdf_approx_identity(omega, x, o.t, o.steps);

  Meta m{"cdf", g.seed, {}};
  m.echo("probs", o.probs);
  m.echo("coeffs", o.coeffs);
  m.echo("t", o.t);
  m.echo_uint("steps", o.steps);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("value", value);
    c.line("strict_value", strict);
    std::string pts, ms, dg;
    for (std::size_t i = 0; i < full.points.size(); ++i) {
      if (i) pts += ';', ms += ';';
      pts += report::fmt_double(full.points[i]);
      ms += report::fmt_double(full.masses[i]);
    }
    for (std::size_t i = 0; i < diag.size(); ++i) {
      if (i) dg += ';';
      dg += report::fmt_double(diag[i]);
    }
    c.line("points", pts);
    c.line("masses", ms);
    if (!diag.empty()) c.line("approx_identity", dg);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("value", value);
  j.field("strict_value", strict);
  j.key("points");
  j.begin_array();
  for (double p : full.points) j.value(p);
  j.end_array();
  j.key("masses");
  j.begin_array();
  for (double p : full.masses) j.value(p);
  j.end_array();
  if (!diag.empty()) {
    j.key("approx_identity");
    j.begin_array();
    for (double p : diag) j.value(p);
    j.end_array();
  }
  j.end_object();
  emit(j.str(), g);
}

struct AepOpts {
  std::string probs;
  unsigned n = 0;
  double eps = 0.0;
  bool lenient = false;
};

void run_aep(const AepOpts& o, const Global& g) {
  const abelian::State omega = make_state(o.probs, g, "--probs");
  const auto policy = o.lenient ? abelian::ZeroPolicy::Lenient : abelian::ZeroPolicy::Strict;
  const abelian::TypicalSummary s =
      abelian::typical_summary(omega, o.n, o.eps, policy, g.make_budget());

  Meta m{"aep", g.seed, {}};
  m.echo("probs", o.probs);
  m.echo_uint("n", o.n);
  m.echo("eps", o.eps);
  m.echo("policy", o.lenient ? "lenient" : "strict");
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line_uint("n", s.n);
    c.line("eps", s.eps);
    c.line("entropy_bits", s.entropy);
    c.line("prob_mass", s.prob_mass);
    c.line("count", s.count_decimal);
    c.line("log2_count", s.log2_count);
    c.line("log2_upper", s.log2_upper);
    c.line("log2_lower", s.log2_lower);
    c.line("sandwich_holds", s.sandwich_holds);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field_uint("n", s.n);
  j.field("eps", s.eps);
  j.field("entropy_bits", s.entropy);
  j.field("prob_mass", s.prob_mass);
  j.field_raw("count", s.count_decimal);
  j.field("log2_count", s.log2_count);
  j.field("log2_upper", s.log2_upper);
  j.field("log2_lower", s.log2_lower);
  j.field("sandwich_holds", s.sandwich_holds);
  j.end_object();
  emit(j.str(), g);
}

struct BinomialOpts {
  unsigned n = 0, k = 0;
  double p = 0.0;
};

void run_binomial(const BinomialOpts& o, const Global& g) {
  const abelian::State factor(abelian::Algebra(2), {1.0 - o.p, o.p});
  const double value = abelian::binomial_cdf(factor, o.n, o.k, g.make_budget());
  Meta m{"binomial", g.seed, {}};
  m.echo_uint("n", o.n);
  m.echo_uint("k", o.k);
  m.echo("p", o.p);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("cdf", value);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("cdf", value);
  j.end_object();
  emit(j.str(), g);
}

struct WaitingOpts {
  std::string probs = "0.5,0.5";
  std::string pattern;
  double t = 0.0;
};

void run_waiting(const WaitingOpts& o, const Global& g) {
  const abelian::State factor = make_state(o.probs, g, "--probs");
  const abelian::PrefixString pattern = parse_digits(o.pattern, factor.dim(), "--pattern");
  const double value = abelian::waiting_cdf(factor, pattern, o.t, g.make_budget());
  Meta m{"waiting", g.seed, {}};
  m.echo("probs", o.probs);
  m.echo("pattern", o.pattern);
  m.echo("t", o.t);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("cdf", value);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("cdf", value);
  j.end_object();
  emit(j.str(), g);
}

struct MarkovOpts {
  std::string probs;
  std::vector<std::string> maps;
  std::string path;
};

void run_markov(const MarkovOpts& o, const Global& g) {
  const abelian::State initial = make_state(o.probs, g, "--probs");
  std::vector<std::vector<double>> maps;
  for (const std::string& arg : o.maps) {
    std::vector<double> flat;
    for (const std::string& row : split(arg, ';')) {
      for (double v : parse_doubles(row, "--map")) flat.push_back(v);
    }
    maps.push_back(std::move(flat));
  }
  const abelian::MarkovChain chain(initial, std::move(maps));
  const std::vector<std::size_t> path = parse_integers<std::size_t>(o.path, "--path");
  const double p = abelian::markov_path_probability(chain, path);

  Meta m{"markov", g.seed, {}};
  m.echo("probs", o.probs);
  for (std::size_t i = 0; i < o.maps.size(); ++i) m.echo("map" + std::to_string(i), o.maps[i]);
  m.echo("path", o.path);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("probability", p);
    c.line_uint("path_length", path.size());
    c.line("stationary", chain.stationary());
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("probability", p);
  j.field_uint("path_length", path.size());
  j.field("stationary", chain.stationary());
  j.end_object();
  emit(j.str(), g);
}

struct KraftOpts {
  std::string lengths;
  std::size_t base = 2;
};

void run_kraft(const KraftOpts& o, const Global& g) {
  const std::vector<unsigned> lengths = parse_integers<unsigned>(o.lengths, "--lengths");
  const abelian::KraftCheck k = abelian::kraft_check(lengths, o.base);
  Meta m{"kraft", g.seed, {}};
  m.echo("lengths", o.lengths);
  m.echo_uint("base", o.base);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("holds", k.holds);
    c.line("slack", k.slack_exact);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("holds", k.holds);
  j.field_raw("slack", k.slack_exact);
  j.end_object();
  emit(j.str(), g);
}

struct CodeOpts {
  std::string file;
  std::string symbols;  // encode
  std::string stream;   // decode
};

void run_code_check(const CodeOpts& o, const Global& g) {
  const abelian::Code code = load_code(o.file);
  const abelian::KraftCheck k = code.kraft();
  Meta m{"code check", g.seed, {}};
  m.echo("file", o.file);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line_uint("code_dim", code.code_dim());
    c.line_uint("source_dim", code.source_dim());
    c.line("prefix_free", code.is_prefix_free());
    c.line("kraft_holds", k.holds);
    c.line("slack", k.slack_exact);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field_uint("code_dim", code.code_dim());
  j.field_uint("source_dim", code.source_dim());
  j.field("prefix_free", code.is_prefix_free());
  j.field("kraft_holds", k.holds);
  j.field_raw("slack", k.slack_exact);
  j.key("lengths");
  j.begin_array();
  for (const auto& w : code.codewords()) j.value_uint(w.size());
  j.end_array();
  j.end_object();
  emit(j.str(), g);
}

void run_code_encode(const CodeOpts& o, const Global& g) {
  const abelian::Code code = load_code(o.file);
  const std::vector<std::uint32_t> symbols = parse_integers<std::uint32_t>(o.symbols, "--symbols");
  const abelian::PrefixString out = code.encode(symbols);
  Meta m{"code encode", g.seed, {}};
  m.echo("file", o.file);
  m.echo("symbols", o.symbols);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("output", digits_to_string(out));
    c.line_uint("length", out.size());
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("output", digits_to_string(out));
  j.field_uint("length", out.size());
  j.end_object();
  emit(j.str(), g);
}

void run_code_decode(const CodeOpts& o, const Global& g) {
  const abelian::Code code = load_code(o.file);
  const abelian::PrefixString stream = parse_digits(o.stream, code.code_dim(), "--stream");
  const std::vector<std::uint32_t> symbols = code.decode(stream);
  Meta m{"code decode", g.seed, {}};
  m.echo("file", o.file);
  m.echo("stream", o.stream);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    std::string syms;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i) syms += ';';
      syms += std::to_string(symbols[i]);
    }
    c.line("symbols", syms);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.key("symbols");
  j.begin_array();
  for (std::uint32_t s : symbols) j.value_uint(s);
  j.end_array();
  j.end_object();
  emit(j.str(), g);
}

struct IndependenceOpts {
  std::string probs;
  std::string dims;
};

void run_independence(const IndependenceOpts& o, const Global& g) {
  const std::vector<std::size_t> dims = parse_integers<std::size_t>(o.dims, "--dims");
  if (dims.size() != 2 || dims[0] == 0 || dims[1] == 0) {
    throw abelian::ValidationError("--dims must be two positive integers d1,d2");
  }
  const abelian::State omega = make_state(o.probs, g, "--probs");
  if (omega.dim() != dims[0] * dims[1]) {
    throw abelian::ValidationError("--probs must list d1*d2 joint weights");
  }
  // coordinate observables of the two factors on the joint basis
  std::vector<abelian::cplx> c1(omega.dim()), c2(omega.dim());
  for (std::size_t i = 0; i < dims[0]; ++i) {
    for (std::size_t jj = 0; jj < dims[1]; ++jj) {
      c1[i * dims[1] + jj] = double(i);
      c2[i * dims[1] + jj] = double(jj);
    }
  }
  const std::vector<abelian::Element> set1{abelian::Element(omega.algebra(), std::move(c1))};
  const std::vector<abelian::Element> set2{abelian::Element(omega.algebra(), std::move(c2))};
  const abelian::IndependenceCheck ind = abelian::independent(omega, {set1, set2});
  const abelian::TensorCoverInstance inst = abelian::tensor_cover_instance(omega, set1, set2);

  Meta m{"independence", g.seed, {}};
  m.echo("probs", o.probs);
  m.echo("dims", o.dims);
  if (g.format == "csv") {
    report::CsvWriter c;
    write_meta(c, m);
    c.line("independent", ind.independent);
    c.line("max_defect", ind.max_defect);
    c.line("cover_holds", inst.check.holds);
    c.line("cover_max_defect", inst.check.max_defect);
    emit(c.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field("independent", ind.independent);
  j.field("max_defect", ind.max_defect);
  j.field("cover_holds", inst.check.holds);
  j.field("cover_max_defect", inst.check.max_defect);
  j.field_uint("source_dim", inst.source.dim());
  j.field_uint("target_dim", inst.target.dim());
  j.end_object();
  emit(j.str(), g);
}

struct ChannelOpts {
  std::string matrix;
  std::string input_probs;
  double rate = 0.0;
  double eps = 0.0;
  unsigned k = 0;
  unsigned trials = 1;
  std::string policy = "uniform";
  std::string codebook;  // supplied policy
};

void run_channel_info(const ChannelOpts& o, const Global& g) {
  const abelian::Channel c = load_channel_file(o.matrix);
  const abelian::State omega = make_state(o.input_probs, g, "--input-probs");
  const abelian::MutualInformation mi = abelian::mutual_information(omega, c);
  const abelian::UselessCheck useless = abelian::is_useless(c);
  const abelian::LosslessCheck lossless = abelian::is_lossless(c);
  const abelian::State pushed = abelian::push_state(omega, c);

  Meta m{"channel info", g.seed, {}};
  m.echo("matrix", o.matrix);
  m.echo("input_probs", o.input_probs);
  if (g.format == "csv") {
    report::CsvWriter cw;
    write_meta(cw, m);
    cw.line_uint("input_dim", c.input_dim());
    cw.line_uint("output_dim", c.output_dim());
    cw.line("mutual_information", mi.value);
    cw.line("input_entropy", mi.input_entropy);
    cw.line("output_entropy", mi.output_entropy);
    cw.line("cond_output_entropy", mi.cond_output_entropy);
    cw.line("cond_input_entropy", mi.cond_input_entropy);
    cw.line("cross_check", mi.cross_check);
    cw.line("useless", useless.useless);
    cw.line("sigma1", useless.sigma1);
    cw.line("sigma2", useless.sigma2);
    cw.line("lossless", lossless.lossless);
    emit(cw.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field_uint("input_dim", c.input_dim());
  j.field_uint("output_dim", c.output_dim());
  j.field("mutual_information", mi.value);
  j.field("input_entropy", mi.input_entropy);
  j.field("output_entropy", mi.output_entropy);
  j.field("cond_output_entropy", mi.cond_output_entropy);
  j.field("cond_input_entropy", mi.cond_input_entropy);
  j.field("cross_check", mi.cross_check);
  j.field("useless", useless.useless);
  j.field("sigma1", useless.sigma1);
  j.field("sigma2", useless.sigma2);
  j.field("lossless", lossless.lossless);
  j.key("output_probs");
  j.begin_array();
  for (double w : pushed.weights()) j.value(w);
  j.end_array();
  j.end_object();
  emit(j.str(), g);
}

struct TrialRow {
  const abelian::CodingReport* rep;
  unsigned index;
  abelian::ZkDiagnostic zk;
  bool has_zk = false;
};

void run_channel_code_sim(const ChannelOpts& o, const Global& g) {
  const abelian::Channel c = load_channel_file(o.matrix);
  const abelian::State omega = make_state(o.input_probs, g, "--input-probs");
  const abelian::CodebookPolicy policy = parse_policy(o.policy);
  std::vector<std::uint64_t> supplied;
  if (!o.codebook.empty()) supplied = parse_integers<std::uint64_t>(o.codebook, "--codebook");
  const std::vector<abelian::CodingReport> reports = abelian::coding_experiment(
      c, omega, o.rate, o.k, o.trials, policy, g.seed, g.make_budget(), supplied);
  const abelian::CodingAggregate agg = abelian::aggregate_reports(reports);

  std::vector<TrialRow> rows(reports.size());
  bool all_zk = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    rows[i].rep = &reports[i];
    rows[i].index = unsigned(i);
    if (o.eps > 0.0) {
      rows[i].zk = abelian::zk_diagnostic(c, omega, o.rate, o.eps, o.k, reports[i].codebook,
                                          g.make_budget());
      rows[i].has_zk = true;
      all_zk = all_zk && rows[i].zk.holds;
    }
  }

  Meta m{"channel code-sim", g.seed, {}};
  m.echo("matrix", o.matrix);
  m.echo("input_probs", o.input_probs);
  m.echo("rate", o.rate);
  m.echo_uint("k", o.k);
  m.echo_uint("trials", o.trials);
  m.echo("policy", o.policy);
  if (o.eps > 0.0) m.echo("eps", o.eps);

  if (g.format == "csv") {
    report::CsvWriter cw;
    write_meta(cw, m);
    cw.line_uint("codebook_size", agg.codebook_size);
    cw.line("mean_error", agg.mean_error);
    cw.line("max_error", agg.max_error);
    cw.line("mean_gap", agg.mean_gap);
    cw.line("max_gap", agg.max_gap);
    cw.line("mean_mass_outside", agg.mean_mass_outside);
    if (o.eps > 0.0) cw.line("all_zk_hold", all_zk);
    std::vector<std::string> header{"trial",   "seed",        "error_prob",
                                    "gap",     "error_prob_conditioned", "mass_outside_support"};
    if (o.eps > 0.0) {
      header.push_back("zk_gap");
      header.push_back("zk_bound");
      header.push_back("zk_holds");
    }
    cw.row(header);
    for (const TrialRow& r : rows) {
      std::vector<std::string> cells{
          std::to_string(r.index),
          std::to_string(r.rep->seed),
          report::fmt_double(r.rep->error_prob),
          report::fmt_double(r.rep->gap),
          report::fmt_double(r.rep->error_prob_conditioned),
          report::fmt_double(r.rep->mass_outside_support)};
      if (r.has_zk) {
        cells.push_back(report::fmt_double(r.zk.gap));
        cells.push_back(report::fmt_double(r.zk.bound));
        cells.push_back(r.zk.holds ? "true" : "false");
      }
      cw.row(cells);
    }
    emit(cw.str(), g);
    return;
  }

  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field_uint("k", o.k);
  j.field("rate", o.rate);
  j.field_uint("codebook_size", agg.codebook_size);
  j.field_uint("trials", o.trials);
  j.field("policy", abelian::policy_name(policy));
  j.key("aggregate");
  j.begin_object();
  j.field("mean_error", agg.mean_error);
  j.field("max_error", agg.max_error);
  j.field("mean_gap", agg.mean_gap);
  j.field("max_gap", agg.max_gap);
  j.field("mean_mass_outside", agg.mean_mass_outside);
  j.end_object();
  if (o.eps > 0.0) j.field("all_zk_hold", all_zk);
  j.key("trials_detail");
  j.begin_array();
  for (const TrialRow& r : rows) {
    j.begin_object();
    j.field_uint("trial", r.index);
    j.field_uint("seed", r.rep->seed);
    j.field("error_prob", r.rep->error_prob);
    j.field("error_prob_conditioned", r.rep->error_prob_conditioned);
    j.field("gap", r.rep->gap);
    j.field("mass_outside_support", r.rep->mass_outside_support);
    if (r.has_zk) {
      j.field("zk_gap", r.zk.gap);
      j.field("zk_bound", r.zk.bound);
      j.field("zk_holds", r.zk.holds);
    }
    j.end_object();
  }
  j.end_array();
  j.end_object();
  emit(j.str(), g);
}

void run_channel_zk(const ChannelOpts& o, const Global& g) {
  const abelian::Channel c = load_channel_file(o.matrix);
  const abelian::State omega = make_state(o.input_probs, g, "--input-probs");
  const abelian::CodebookPolicy policy = parse_policy(o.policy);
  const std::uint64_t universe = pow_u64(c.input_dim(), o.k, "channel zk");
  const auto r = std::uint64_t(std::ceil(std::exp2(double(o.k) * o.rate)));
  std::vector<std::uint64_t> supplied;
  if (!o.codebook.empty()) supplied = parse_integers<std::uint64_t>(o.codebook, "--codebook");
  const std::uint64_t seed = policy == abelian::CodebookPolicy::UniformWithoutReplacement
                                 ? abelian::trial_seed(g.seed, 0)
                                 : g.seed;
  const std::uint64_t size = policy == abelian::CodebookPolicy::Supplied
                                 ? std::uint64_t(supplied.size())
                                 : r;
  const std::vector<std::uint64_t> cb =
      abelian::make_codebook(universe, size, policy, seed, supplied);
  const abelian::ZkDiagnostic zk =
      abelian::zk_diagnostic(c, omega, o.rate, o.eps, o.k, cb, g.make_budget());

  Meta m{"channel zk", g.seed, {}};
  m.echo("matrix", o.matrix);
  m.echo("input_probs", o.input_probs);
  m.echo("rate", o.rate);
  m.echo("eps", o.eps);
  m.echo_uint("k", o.k);
  m.echo("policy", o.policy);
  if (g.format == "csv") {
    report::CsvWriter cw;
    write_meta(cw, m);
    cw.line_uint("codebook_size", cb.size());
    cw.line("gap", zk.gap);
    cw.line("bound", zk.bound);
    cw.line("holds", zk.holds);
    emit(cw.str(), g);
    return;
  }
  report::JsonWriter j;
  j.begin_object();
  write_meta(j, m);
  j.field_uint("k", o.k);
  j.field("rate", o.rate);
  j.field("eps", o.eps);
  j.field_uint("codebook_size", cb.size());
  j.field("gap", zk.gap);
  j.field("bound", zk.bound);
  j.field("holds", zk.holds);
  j.end_object();
  emit(j.str(), g);
}

struct SweepOpts {
  std::string config;
};

void run_sweep(const SweepOpts& o, const Global& g) {
  const nlohmann::json doc = load_json(o.config);
  const std::string kind = doc.at("kind").get<std::string>();
  const std::uint64_t seed = doc.value("seed", g.seed);

  Meta m{"sweep", seed, {}};
  m.echo("config", o.config);
  m.echo("kind", kind);

  if (kind == "coding") {
    abelian::Channel c = doc.contains("matrix_file")
                             ? load_channel_file(doc.at("matrix_file").get<std::string>())
                             : load_channel(doc);
    std::vector<double> probs = doc.at("input_probs").get<std::vector<double>>();
    const abelian::Algebra alg(probs.size());
    const abelian::State omega(alg, std::move(probs), g.renormalize);
    const double rate = doc.at("rate").get<double>();
    const double eps = doc.value("eps", 0.0);
    const unsigned trials = doc.value("trials", 1u);
    const abelian::CodebookPolicy policy = parse_policy(doc.value("policy", std::string("uniform")));
    const std::vector<unsigned> ks = doc.value("k_values", std::vector<unsigned>{});
    m.echo("rate", rate);
    if (eps > 0.0) m.echo("eps", eps);
    m.echo_uint("trials", trials);
    m.echo("policy", abelian::policy_name(policy));

    struct Row {
      abelian::CodingAggregate agg;
      double zk_max_gap = 0.0, zk_bound = 0.0;
      bool all_zk = true, has_zk = false;
    };
    std::vector<Row> rows;
    for (unsigned k : ks) {
      Row row;
      const auto reports =
          abelian::coding_experiment(c, omega, rate, k, trials, policy, seed, g.make_budget());
      row.agg = abelian::aggregate_reports(reports);
      if (eps > 0.0) {
        row.has_zk = true;
        row.zk_bound = std::exp2(-double(k) * eps);
        for (const auto& rep : reports) {
          const auto zk =
              abelian::zk_diagnostic(c, omega, rate, eps, k, rep.codebook, g.make_budget());
          row.zk_max_gap = std::max(row.zk_max_gap, zk.gap);
          row.all_zk = row.all_zk && zk.holds;
        }
      }
      rows.push_back(row);
    }

    if (g.format == "csv") {
      report::CsvWriter cw;
      std::vector<std::string> header{"k",       "rate",    "codebook_size", "trials",
                                      "mean_error", "max_error", "mean_gap",   "max_gap",
                                      "mean_mass_outside"};
      if (eps > 0.0) {
        header.push_back("zk_max_gap");
        header.push_back("zk_bound");
        header.push_back("all_zk_hold");
      }
      cw.row(header);
      for (const Row& r : rows) {
        std::vector<std::string> cells{std::to_string(r.agg.k),
                                       report::fmt_double(r.agg.rate),
                                       std::to_string(r.agg.codebook_size),
                                       std::to_string(r.agg.trials),
                                       report::fmt_double(r.agg.mean_error),
                                       report::fmt_double(r.agg.max_error),
                                       report::fmt_double(r.agg.mean_gap),
                                       report::fmt_double(r.agg.max_gap),
                                       report::fmt_double(r.agg.mean_mass_outside)};
        if (r.has_zk) {
          cells.push_back(report::fmt_double(r.zk_max_gap));
          cells.push_back(report::fmt_double(r.zk_bound));
          cells.push_back(r.all_zk ? "true" : "false");
        }
        cw.row(cells);
      }
      emit(cw.str(), g);
      return;
    }
    report::JsonWriter j;
    j.begin_object();
    write_meta(j, m);
    j.key("rows");
    j.begin_array();
    for (const Row& r : rows) {
      j.begin_object();
      j.field_uint("k", r.agg.k);
      j.field("rate", r.agg.rate);
      j.field_uint("codebook_size", r.agg.codebook_size);
      j.field_uint("trials", r.agg.trials);
      j.field("mean_error", r.agg.mean_error);
      j.field("max_error", r.agg.max_error);
      j.field("mean_gap", r.agg.mean_gap);
      j.field("max_gap", r.agg.max_gap);
      j.field("mean_mass_outside", r.agg.mean_mass_outside);
      if (r.has_zk) {
        j.field("zk_max_gap", r.zk_max_gap);
        j.field("zk_bound", r.zk_bound);
        j.field("all_zk_hold", r.all_zk);
      }
      j.end_object();
    }
    j.end_array();
    j.end_object();
    emit(j.str(), g);
    return;
  }

  if (kind == "aep") {
    std::vector<double> probs = doc.at("probs").get<std::vector<double>>();
    const abelian::Algebra alg(probs.size());
    const abelian::State omega(alg, std::move(probs), g.renormalize);
    const double eps = doc.at("eps").get<double>();
    const std::vector<unsigned> ns = doc.value("n_values", std::vector<unsigned>{});
    const auto policy = doc.value("policy", std::string("strict")) == "lenient"
                            ? abelian::ZeroPolicy::Lenient
                            : abelian::ZeroPolicy::Strict;
    m.echo("eps", eps);

    std::vector<abelian::TypicalSummary> rows;
    for (unsigned n : ns) {
      rows.push_back(abelian::typical_summary(omega, n, eps, policy, g.make_budget()));
    }

    if (g.format == "csv") {
      report::CsvWriter cw;
      cw.row({"n", "eps", "entropy_bits", "prob_mass", "count", "log2_count", "log2_upper",
              "log2_lower", "sandwich_holds"});
      for (const auto& s : rows) {
        cw.row({std::to_string(s.n), report::fmt_double(s.eps), report::fmt_double(s.entropy),
                report::fmt_double(s.prob_mass), s.count_decimal,
                report::fmt_double(s.log2_count), report::fmt_double(s.log2_upper),
                report::fmt_double(s.log2_lower), s.sandwich_holds ? "true" : "false"});
      }
      emit(cw.str(), g);
      return;
    }
    report::JsonWriter j;
    j.begin_object();
    write_meta(j, m);
    j.key("rows");
    j.begin_array();
    for (const auto& s : rows) {
      j.begin_object();
      j.field_uint("n", s.n);
      j.field("eps", s.eps);
      j.field("entropy_bits", s.entropy);
      j.field("prob_mass", s.prob_mass);
      j.field_raw("count", s.count_decimal);
      j.field("log2_count", s.log2_count);
      j.field("log2_upper", s.log2_upper);
      j.field("log2_lower", s.log2_lower);
      j.field("sandwich_holds", s.sandwich_holds);
      j.end_object();
    }
    j.end_array();
    j.end_object();
    emit(j.str(), g);
    return;
  }

  throw abelian::ValidationError("unknown sweep kind: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  Global g;
  CLI::App app{"Algebraic probability and information toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_path, "Write the report to this path instead of stdout");
  app.add_option("--seed", g.seed, "Master seed recorded in every report");
  app.add_option("--budget", g.budget, "log2 of the dense-coordinate budget")
      ->envname("ABELIAN_INFO_BUDGET");
  app.add_flag("--renormalize", g.renormalize, "Renormalize probability inputs instead of rejecting");

  auto leaf = [](CLI::App* sub) {
    sub->fallthrough();
    return sub;
  };

  {
    auto o = std::make_shared<EntropyOpts>();
    auto* sub = leaf(app.add_subcommand("entropy", "Shannon entropy of a state"));
    sub->add_option("--probs", o->probs, "Comma-separated weights")->required();
    sub->callback([o, &g] { run_entropy(*o, g); });
  }
  {
    auto o = std::make_shared<CdfOpts>();
    auto* sub = leaf(app.add_subcommand("cdf", "Distribution function of an observable"));
    sub->add_option("--probs", o->probs)->required();
    sub->add_option("--coeffs", o->coeffs, "Real coordinates of the observable")->required();
    sub->add_option("--t", o->t, "Threshold")->required();
    sub->add_option("--steps", o->steps, "Approximate-identity diagnostic steps");
    sub->callback([o, &g] { run_cdf(*o, g); });
  }
  {
    auto o = std::make_shared<AepOpts>();
    auto* sub = leaf(app.add_subcommand("aep", "Typical-set summary via type classes"));
    sub->add_option("--probs", o->probs)->required();
    sub->add_option("--n", o->n, "Block length")->required();
    sub->add_option("--eps", o->eps, "Typicality window")->required();
    sub->add_flag("--lenient", o->lenient, "Drop zero-weight symbols instead of rejecting");
    sub->callback([o, &g] { run_aep(*o, g); });
  }
  {
    auto o = std::make_shared<BinomialOpts>();
    auto* sub = leaf(app.add_subcommand("binomial", "Binomial distribution function"));
    sub->add_option("--n", o->n)->required();
    sub->add_option("--k", o->k)->required();
    sub->add_option("--p", o->p, "Success probability")->required();
    sub->callback([o, &g] { run_binomial(*o, g); });
  }
  {
    auto o = std::make_shared<WaitingOpts>();
    auto* sub = leaf(app.add_subcommand("waiting", "Waiting time for a pattern"));
    sub->add_option("--probs", o->probs, "Factor weights (default 0.5,0.5)");
    sub->add_option("--pattern", o->pattern, "Pattern digits")->required();
    sub->add_option("--t", o->t, "Threshold")->required();
    sub->callback([o, &g] { run_waiting(*o, g); });
  }
  {
    auto o = std::make_shared<MarkovOpts>();
    auto* sub = leaf(app.add_subcommand("markov", "Markov path probability"));
    sub->add_option("--probs", o->probs, "Initial state weights")->required();
    sub->add_option("--map", o->maps, "Transition map, rows separated by ';' (repeatable)")
        ->required();
    sub->add_option("--path", o->path, "Comma-separated basis indices")->required();
    sub->callback([o, &g] { run_markov(*o, g); });
  }
  {
    auto o = std::make_shared<KraftOpts>();
    auto* sub = leaf(app.add_subcommand("kraft", "Kraft inequality in exact integers"));
    sub->add_option("--lengths", o->lengths, "Comma-separated word lengths")->required();
    sub->add_option("--base", o->base, "Code alphabet size")->required();
    sub->callback([o, &g] { run_kraft(*o, g); });
  }
  {
    auto* code = app.add_subcommand("code", "Prefix code operations");
    code->require_subcommand(1);
    code->fallthrough();
    auto o = std::make_shared<CodeOpts>();
    auto* check = leaf(code->add_subcommand("check", "Prefix-freeness and Kraft check"));
    check->add_option("--file", o->file, "Code JSON file")->required();
    check->callback([o, &g] { run_code_check(*o, g); });
    auto* enc = leaf(code->add_subcommand("encode", "Encode source symbols"));
    enc->add_option("--file", o->file)->required();
    enc->add_option("--symbols", o->symbols, "Comma-separated source symbols")->required();
    enc->callback([o, &g] { run_code_encode(*o, g); });
    auto* dec = leaf(code->add_subcommand("decode", "Greedy decode of a code stream"));
    dec->add_option("--file", o->file)->required();
    dec->add_option("--stream", o->stream, "Code digit string")->required();
    dec->callback([o, &g] { run_code_decode(*o, g); });
  }
  {
    auto o = std::make_shared<IndependenceOpts>();
    auto* sub = leaf(app.add_subcommand("independence", "Joint-state independence via covers"));
    sub->add_option("--probs", o->probs, "Joint weights, d1*d2 entries")->required();
    sub->add_option("--dims", o->dims, "Factor dimensions d1,d2")->required();
    sub->callback([o, &g] { run_independence(*o, g); });
  }
  {
    auto* channel = app.add_subcommand("channel", "Discrete memoryless channel operations");
    channel->require_subcommand(1);
    channel->fallthrough();
    auto o = std::make_shared<ChannelOpts>();
    auto* info = leaf(channel->add_subcommand("info", "Classification and mutual information"));
    info->add_option("--matrix", o->matrix, "Channel JSON file")->required();
    info->add_option("--input-probs", o->input_probs)->required();
    info->callback([o, &g] { run_channel_info(*o, g); });
    auto* sim = leaf(channel->add_subcommand("code-sim", "Exact channel-coding experiment"));
    sim->add_option("--matrix", o->matrix)->required();
    sim->add_option("--input-probs", o->input_probs)->required();
    sim->add_option("--rate", o->rate, "Transmission rate R")->required();
    sim->add_option("--k", o->k, "Block length")->required();
    sim->add_option("--trials", o->trials, "Codebook trials");
    sim->add_option("--policy", o->policy)
        ->check(CLI::IsMember({"uniform", "lexicographic", "supplied"}));
    sim->add_option("--codebook", o->codebook, "Supplied codeword indices");
    sim->add_option("--eps", o->eps, "Also run the zk diagnostic with this eps");
    sim->callback([o, &g] { run_channel_code_sim(*o, g); });
    auto* zk = leaf(channel->add_subcommand("zk", "Typical-rate projection diagnostic"));
    zk->add_option("--matrix", o->matrix)->required();
    zk->add_option("--input-probs", o->input_probs)->required();
    zk->add_option("--rate", o->rate)->required();
    zk->add_option("--eps", o->eps)->required();
    zk->add_option("--k", o->k)->required();
    zk->add_option("--policy", o->policy)
        ->check(CLI::IsMember({"uniform", "lexicographic", "supplied"}));
    zk->add_option("--codebook", o->codebook);
    zk->callback([o, &g] { run_channel_zk(*o, g); });
  }
  {
    auto o = std::make_shared<SweepOpts>();
    auto* sub = leaf(app.add_subcommand("sweep", "Grid runs driven by a config file"));
    sub->add_option("--config", o->config, "Sweep config JSON")->required();
    sub->callback([o, &g] { run_sweep(*o, g); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const abelian::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 2;
  } catch (const abelian::ComputationError& e) {
    std::fprintf(stderr, "computation error: %s\n", e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "malformed file: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
