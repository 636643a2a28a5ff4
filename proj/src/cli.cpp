#include "crl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "crl/cantor.hpp"
#include "crl/dynamics.hpp"
#include "crl/equidist.hpp"
#include "crl/intset.hpp"
#include "crl/kernels.hpp"
#include "crl/parallel.hpp"
#include "crl/ramsey.hpp"

namespace crl::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr const char* kSchema = "crl/1";

/// A serialised result: one JSON document, an optional CSV table, an optional plain-text body.
struct Report {
  Json doc = Json::object();
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::string text;
  int status = kOk;
};


Json number(u128 v) {
  if (v <= std::numeric_limits<std::uint64_t>::max()) return Json(static_cast<std::uint64_t>(v));
  return Json(to_string(v));
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json spec_json(const DigitSpec& spec) { return Json{{"base", spec.base()}, {"digits", spec.digits()}}; }

Json rational_json(const Rational& r) { return Json{{"exact", to_text(r)}, {"approx", to_double(r)}}; }

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void render_text(const Json& doc, std::ostream& out) {
  for (const auto& [key, value] : doc.items()) {
    if (key == "schema") continue;
    if (value.is_array() && std::all_of(value.begin(), value.end(), [](const Json& e) { return e.is_primitive(); })) {
      out << key << ':';
      for (const auto& e : value) out << ' ' << scalar_text(e);
      out << '\n';
    } else {
      out << key << ": " << scalar_text(value) << '\n';
    }
  }
}

void render_csv(const Report& r, std::ostream& out) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  if (!r.csv_header.empty()) {
    line(r.csv_header);
    for (const auto& row : r.csv_rows) line(row);
    return;
  }
  out << "key,value\n";
  for (const auto& [key, value] : r.doc.items())
    if (value.is_primitive()) out << key << ',' << scalar_text(value) << '\n';
}

void emit(const Report& r, const std::string& format, std::ostream& out) {
  if (format == "json") {
    out << r.doc.dump(2) << '\n';
  } else if (format == "csv") {
    render_csv(r, out);
  } else if (!r.text.empty()) {
    out << r.text;
  } else {
    render_text(r.doc, out);
  }
}

Report start_report(const std::string& command) {
  Report r;
  r.doc["schema"] = kSchema;
  r.doc["command"] = command;
  return r;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("bad number '" + s + "'");
  }
  if (used != s.size()) throw DomainError("bad number '" + s + "'");
  return v;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw DomainError("bad integer '" + s + "'");
  }
  if (used != s.size()) throw DomainError("bad integer '" + s + "'");
  return v;
}

// "cyclic:m=3,r=1" | "torus:alpha=sqrt2" | "bernoulli"
System parse_system(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::map<std::string, std::string> params;
  if (colon != std::string::npos)
    for (const auto& kv : split(std::string_view(text).substr(colon + 1), ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DomainError("system parameter '" + kv + "' needs key=value");
      params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  if (kind == "cyclic") {
    if (!params.count("m")) throw DomainError("cyclic system needs m");
    const auto m = parse_int(params["m"]);
    const auto r = params.count("r") ? parse_int(params["r"]) : 1;
    if (m < 1 || r < 0) throw DomainError("cyclic system needs m >= 1 and r >= 0");
    return CyclicRotation{static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(r)};
  }
  if (kind == "torus") {
    if (!params.count("alpha")) throw DomainError("torus system needs alpha");
    return TorusRotation{Frequency::parse(params["alpha"])};
  }
  if (kind == "bernoulli") return BernoulliShift{};
  throw DomainError("unknown system '" + kind + "' (cyclic, torus, bernoulli)");
}

std::string system_text(const System& s) {
  return std::visit(
      [](const auto& sys) -> std::string {
        using T = std::decay_t<decltype(sys)>;
        if constexpr (std::is_same_v<T, CyclicRotation>)
          return "cyclic:m=" + std::to_string(sys.modulus) + ",r=" + std::to_string(sys.step);
        else if constexpr (std::is_same_v<T, TorusRotation>)
          return "torus:alpha=" + sys.alpha.to_text();
        else
          return "bernoulli";
      },
      s);
}

// indicator:a,b,.. | vector:v0,v1,.. | trig:m=re[:im];.. | interval:lo,hi | cylinder:w=W;table=.. | coord | const:c
Observable parse_observable(const std::string& text, const System& system) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "const") return constant_observable(system, body.empty() ? 1.0 : parse_double(body));
  if (kind == "indicator") {
    const auto* cyc = std::get_if<CyclicRotation>(&system);
    if (!cyc) throw DomainError("indicator observables need a cyclic system");
    std::vector<std::uint64_t> members;
    if (!body.empty())
      for (const auto& s : split(body, ',')) {
        const auto v = parse_int(s);
        if (v < 0) throw DomainError("indicator residue must be non-negative");
        members.push_back(static_cast<std::uint64_t>(v));
      }
    return IndicatorVector::of_set(cyc->modulus, members);
  }
  if (kind == "vector") {
    IndicatorVector f;
    for (const auto& s : split(body, ',')) f.values.push_back(parse_double(s));
    return f;
  }
  if (kind == "trig") {
    TrigPolynomial f;
    for (const auto& term : split(body, ';')) {
      const auto eq = term.find('=');
      if (eq == std::string::npos) throw DomainError("trig term '" + term + "' needs m=coefficient");
      const auto parts = split(std::string_view(term).substr(eq + 1), ':');
      const double re = parse_double(parts[0]);
      const double im = parts.size() > 1 ? parse_double(parts[1]) : 0.0;
      f.coeffs[parse_int(term.substr(0, eq))] += std::complex<double>(re, im);
    }
    return f;
  }
  if (kind == "interval") {
    const auto parts = split(body, ',');
    if (parts.size() != 2) throw DomainError("interval observable needs lo,hi");
    return ArcIndicator{parse_double(parts[0]), parse_double(parts[1])};
  }
  if (kind == "coord") return Cylinder::coordinate();
  if (kind == "cylinder") {
    Cylinder f;
    bool have_table = false;
    for (const auto& kv : split(body, ';')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw DomainError("cylinder parameter '" + kv + "' needs key=value");
      const auto key = kv.substr(0, eq);
      const auto value = kv.substr(eq + 1);
      if (key == "w") {
        const auto w = parse_int(value);
        if (w < 0) throw DomainError("cylinder half-width must be non-negative");
        f.half_width = static_cast<unsigned>(w);
      } else if (key == "table") {
        for (const auto& s : split(value, ',')) f.table.push_back(parse_double(s));
        have_table = true;
      } else {
        throw DomainError("unknown cylinder parameter '" + key + "'");
      }
    }
    if (!have_table) throw DomainError("cylinder observable needs table=...");
    return f;
  }
  throw DomainError("unknown observable '" + kind + "'");
}

Json average_json(const AverageValue& v) {
  return std::visit(
      [](const auto& a) -> Json {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IndicatorVector>) {
          return Json{{"kind", "vector"}, {"values", a.values}};
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          Json coeffs = Json::array();
          for (const auto& [m, c] : a.coeffs)
            coeffs.push_back(Json{{"m", m}, {"re", c.real()}, {"im", c.imag()}, {"modulus", std::abs(c)}});
          return Json{{"kind", "trig"}, {"coeffs", coeffs}};
        } else {
          return Json{{"kind", "bernoulli_profile"},
                      {"mean", rational_json(a.mean)},
                      {"deviation_sq", rational_json(a.deviation_sq)}};
        }
      },
      v);
}

void average_csv(const AverageValue& v, Report& r) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, IndicatorVector>) {
          r.csv_header = {"x", "value"};
          for (std::size_t x = 0; x < a.values.size(); ++x) r.csv_rows.push_back({std::to_string(x), fmt(a.values[x])});
        } else if constexpr (std::is_same_v<T, TrigPolynomial>) {
          r.csv_header = {"m", "re", "im", "modulus"};
          for (const auto& [m, c] : a.coeffs)
            r.csv_rows.push_back({std::to_string(m), fmt(c.real()), fmt(c.imag()), fmt(std::abs(c))});
        } else {
          r.csv_header = {"mean", "deviation_sq"};
          r.csv_rows.push_back({to_text(a.mean), to_text(a.deviation_sq)});
        }
      },
      v);
}

Json witness_json(const ProgressionWitness& w) {
  Json j{{"x", w.start}, {"r", number(w.step)}, {"t", w.length}};
  if (w.color) j["color"] = *w.color;
  j["direction"] = w.direction == Direction::Forward ? "forward" : "backward";
  j["points"] = w.points();
  return j;
}

Direction parse_direction(const std::string& s) {
  if (s == "forward") return Direction::Forward;
  if (s == "backward") return Direction::Backward;
  throw DomainError("direction must be forward or backward");
}

std::vector<unsigned> parse_windows(const std::string& s) {
  std::vector<unsigned> out;
  for (const auto& part : split(s, ',')) {
    const auto v = parse_int(part);
    if (v < 1) throw DomainError("H must be at least 1");
    out.push_back(static_cast<unsigned>(v));
  }
  return out;
}

struct Options {
  std::string spec = "b=3;D=0,2";
  std::string format = "json";
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::string kernel;

  std::uint64_t count = 8;
  std::uint64_t start = 0;
  std::string value;
  std::uint64_t h = 1;
  std::uint64_t N = 1024;
  std::uint64_t M = 0;
  std::uint64_t q = 3;
  std::uint64_t max_q = 12;
  std::string alpha = "sqrt2";
  std::string vdc_alpha = "random";
  bool decay = false;
  bool indices = false;
  std::string system = "cyclic:m=3,r=1";
  std::string observable = "indicator:0";
  unsigned i = 0;
  unsigned ell = 2;
  std::string min_step = "0";
  std::string H = "1,4,16,64";
  std::uint64_t trials = 1000;
  std::string coloring;
  std::uint64_t W = 0;
  std::uint64_t t = 2;
  std::uint32_t L = 2;
  std::uint64_t W_max = 64;
  std::uint64_t budget = kDefaultNodeBudget;
  std::string parts;
  std::string set;
  std::string direction = "forward";
  bool witnesses = false;
};

// --- commands ------------------------------------------------------------------------------

Report cmd_enumerate(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  Report r = start_report("enumerate");
  r.doc["spec"] = spec_json(spec);
  r.doc["start"] = o.start;
  r.doc["count"] = o.count;
  Json elements = Json::array();
  r.csv_header = {"n", "k", "digit_sum"};
  std::ostringstream text;
  if (o.count > 0) {
    CantorOdometer odo(spec, o.start);
    for (std::uint64_t c = 0; c < o.count; ++c) {
      if (c) odo.advance();
      elements.push_back(number(odo.value()));
      r.csv_rows.push_back({std::to_string(odo.index()), to_string(odo.value()), std::to_string(odo.digit_sum())});
      text << (c ? " " : "") << to_string(odo.value());
    }
  }
  r.doc["elements"] = elements;
  r.text = text.str() + "\n";
  return r;
}

Report cmd_rank(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const u128 m = parse_u128(o.value);
  const auto n = rank(spec, m);
  Report r = start_report("rank");
  r.doc["spec"] = spec_json(spec);
  r.doc["value"] = number(m);
  r.doc["member"] = n.has_value();
  r.doc["rank"] = n ? Json(*n) : Json(nullptr);
  r.text = n ? std::to_string(*n) + "\n" : std::string("NotMember\n");
  return r;
}

Report cmd_contains(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const u128 m = parse_u128(o.value);
  Report r = start_report("contains");
  r.doc["spec"] = spec_json(spec);
  r.doc["value"] = number(m);
  r.doc["contains"] = contains(spec, m);
  r.text = contains(spec, m) ? "true\n" : "false\n";
  return r;
}

Report cmd_deltas(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto ds = delta_star(spec, o.h, o.N);
  Report r = start_report("deltas");
  r.doc["spec"] = spec_json(spec);
  r.doc["h"] = ds.gap;
  r.doc["N"] = ds.prefix;
  Json entries = Json::array();
  r.csv_header = {"k", "s", "ap_start", "ap_step", "ap_count"};
  for (const auto& [key, entry] : ds.entries) {
    Json e{{"k", number(key.jump)}, {"s", key.sum_jump}, {"count", entry.indices.size()}};
    Json aps = Json::array();
    for (const auto& ap : entry.progressions) {
      aps.push_back(Json{{"start", ap.start}, {"step", ap.step}, {"count", ap.count}});
      r.csv_rows.push_back({to_string(key.jump), std::to_string(key.sum_jump), std::to_string(ap.start),
                            std::to_string(ap.step), std::to_string(ap.count)});
    }
    e["progressions"] = aps;
    if (o.indices) e["indices"] = entry.indices;
    entries.push_back(e);
  }
  r.doc["entries"] = entries;
  return r;
}

Report cmd_residues(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto dist = residue_window(spec, o.q, o.start, o.start + o.N);
  Report r = start_report("residues");
  r.doc["spec"] = spec_json(spec);
  r.doc["q"] = dist.modulus;
  r.doc["first"] = dist.first;
  r.doc["N"] = dist.size();
  Json rows = Json::array();
  r.csv_header = {"q", "a", "frequency", "N"};
  for (std::uint64_t a = 0; a < dist.modulus; ++a) {
    const auto f = dist.frequency(a);
    rows.push_back(Json{{"a", a}, {"count", dist.counts[a]}, {"frequency", to_text(f)}, {"approx", to_double(f)}});
    r.csv_rows.push_back({std::to_string(dist.modulus), std::to_string(a), to_text(f), std::to_string(dist.size())});
  }
  r.doc["residues"] = rows;
  return r;
}

std::vector<Index> decay_prefixes(Index N) {
  std::vector<Index> out;
  for (Index p = 1; p < N; p *= 2) out.push_back(p);
  out.push_back(N);
  return out;
}

Report cmd_weyl(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto alpha = Frequency::parse(o.alpha);
  Report r = start_report("weyl");
  r.doc["spec"] = spec_json(spec);
  r.doc["alpha"] = alpha.to_text();
  r.csv_header = {"alpha", "N", "modulus"};
  if (o.decay) {
    const auto rows = weyl_decay(spec, alpha, decay_prefixes(o.N));
    Json table = Json::array();
    for (const auto& row : rows) {
      table.push_back(Json{{"N", row.prefix}, {"modulus", row.modulus}});
      r.csv_rows.push_back({alpha.to_text(), std::to_string(row.prefix), fmt(row.modulus)});
    }
    r.doc["N"] = o.N;
    r.doc["modulus"] = rows.back().modulus;
    r.doc["decay"] = table;
    return r;
  }
  const auto w = weyl_sum(spec, alpha, o.N);
  r.doc["N"] = w.prefix;
  r.doc["value"] = complex_json(w.value);
  r.doc["modulus"] = w.modulus;
  r.csv_rows.push_back({alpha.to_text(), std::to_string(w.prefix), fmt(w.modulus)});
  return r;
}

Report cmd_discrepancy(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto alpha = Frequency::parse(o.alpha);
  Report r = start_report("discrepancy");
  r.doc["spec"] = spec_json(spec);
  r.doc["alpha"] = alpha.to_text();
  r.doc["N"] = o.N;
  r.doc["star_discrepancy"] = star_discrepancy(spec, alpha, o.N);
  return r;
}

Report cmd_spectra(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto prof = spectral_profile(spec, o.max_q, o.N);
  Report r = start_report("spectra");
  r.doc["spec"] = spec_json(spec);
  r.doc["N"] = prof.prefix;
  r.doc["max_q"] = o.max_q;
  Json entries = Json::array();
  r.csv_header = {"p", "q", "re", "im", "modulus"};
  for (const auto& e : prof.entries) {
    entries.push_back(Json{{"r", std::to_string(e.p) + "/" + std::to_string(e.q)},
                           {"gamma", complex_json(e.gamma)},
                           {"modulus", std::abs(e.gamma)}});
    r.csv_rows.push_back(
        {std::to_string(e.p), std::to_string(e.q), fmt(e.gamma.real()), fmt(e.gamma.imag()), fmt(std::abs(e.gamma))});
  }
  r.doc["entries"] = entries;
  return r;
}

Report dynamics_report(const std::string& command, const Options& o, const DigitSpec& spec, const System& system) {
  Report r = start_report(command);
  r.doc["spec"] = spec_json(spec);
  r.doc["system"] = system_text(system);
  r.doc["observable"] = o.observable;
  return r;
}

Report cmd_ergavg(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto system = parse_system(o.system);
  const auto f = parse_observable(o.observable, system);
  Report r = dynamics_report("ergavg", o, spec, system);
  r.doc["N"] = o.N;
  const auto avg = ergodic_average(system, f, spec, o.N);
  r.doc["average"] = average_json(avg);
  if (!std::holds_alternative<BernoulliShift>(system) &&
      !(std::holds_alternative<TorusRotation>(system) && !std::get<TorusRotation>(system).alpha.is_rational()))
    r.doc["prediction"] = average_json(spectral_prediction(system, f, spec, o.N));
  average_csv(avg, r);
  return r;
}

Report cmd_window(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto system = parse_system(o.system);
  const auto f = parse_observable(o.observable, system);
  Report r = dynamics_report("window", o, spec, system);
  r.doc["M"] = o.M;
  r.doc["N"] = o.N;
  const auto avg = uniform_window_average(system, f, spec, o.M, o.N);
  r.doc["average"] = average_json(avg);
  average_csv(avg, r);
  return r;
}

Report cmd_progavg(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto system = parse_system(o.system);
  const auto f = parse_observable(o.observable, system);
  Report r = dynamics_report("progavg", o, spec, system);
  r.doc["start"] = o.start;
  r.doc["i"] = o.i;
  r.doc["N"] = o.N;
  const auto avg = progression_average(system, f, spec, o.start, o.i, o.N);
  r.doc["average"] = average_json(avg);
  average_csv(avg, r);
  return r;
}

Report cmd_recur(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto system = parse_system(o.system);
  const auto f = parse_observable(o.observable, system);
  const u128 min_step = parse_u128(o.min_step);
  Report r = dynamics_report("recur", o, spec, system);
  r.doc["ell"] = o.ell;
  r.doc["N"] = o.N;
  r.doc["min_step"] = number(min_step);
  const auto v = multi_recurrence_average(system, f, spec, o.ell, o.N, min_step);
  r.doc["terms"] = v.terms;
  r.doc["value"] = v.value;
  r.doc["exact"] = v.exact ? Json(to_text(*v.exact)) : Json(nullptr);
  return r;
}

Report cmd_vdc(const Options& o) {
  if (o.N < 1) throw DomainError("N must be at least 1");
  const auto windows = parse_windows(o.H);
  Report r = start_report("vdc");
  r.doc["N"] = o.N;
  r.doc["seed"] = o.seed;
  r.csv_header = {"H", "trials", "holds", "max_gap"};
  std::vector<std::vector<std::complex<double>>> sequences;
  std::string source = "random";
  if (o.vdc_alpha != "random") {
    // a_j = e^{2 pi i alpha k_j}, a single deterministic sequence
    const auto spec = DigitSpec::parse(o.spec);
    const auto alpha = Frequency::parse(o.vdc_alpha);
    std::vector<std::complex<double>> a;
    CantorOdometer odo(spec, 0);
    for (Index j = 0; j < o.N; ++j) {
      if (j) odo.advance();
      a.push_back(std::polar(1.0, 2 * std::numbers::pi * alpha.turns(odo.value())));
    }
    sequences.push_back(std::move(a));
    source = "weyl:" + alpha.to_text() + ":" + spec.to_text();
  } else {
    std::mt19937_64 rng(o.seed);
    for (std::uint64_t trial = 0; trial < o.trials; ++trial) {
      std::vector<std::complex<double>> a(o.N);
      for (auto& z : a) z = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1p-53);
      sequences.push_back(std::move(a));
    }
  }
  r.doc["sequence"] = source;
  r.doc["trials"] = sequences.size();
  Json rows = Json::array();
  bool all = true;
  for (auto H : windows) {
    std::uint64_t holds = 0;
    double gap = -std::numeric_limits<double>::infinity();
    double lhs = 0, rhs = 0;
    for (const auto& a : sequences) {
      const auto v = vdc_check(a, H);
      holds += v.holds;
      gap = std::max(gap, v.lhs - v.rhs);
      lhs = v.lhs;
      rhs = v.rhs;
    }
    all = all && holds == sequences.size();
    Json row{{"H", H}, {"holds", holds}, {"max_gap", gap}};
    if (sequences.size() == 1) {
      row["lhs"] = lhs;
      row["rhs"] = rhs;
    }
    rows.push_back(row);
    r.csv_rows.push_back({std::to_string(H), std::to_string(sequences.size()), std::to_string(holds), fmt(gap)});
  }
  r.doc["windows"] = rows;
  r.doc["holds"] = all;
  return r;
}

Report cmd_vdw_find(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  if (o.coloring.empty()) throw DomainError("--coloring is required");
  const auto coloring = Coloring::from_pattern(o.coloring, o.W);
  const auto w = find_mono_progression(coloring, o.t, spec);
  Report r = start_report("vdw-find");
  r.doc["spec"] = spec_json(spec);
  r.doc["W"] = coloring.size();
  r.doc["L"] = coloring.palette();
  r.doc["t"] = o.t;
  r.doc["found"] = w.has_value();
  r.doc["witness"] = w ? witness_json(*w) : Json(nullptr);
  r.doc["verified"] = w ? verify_witness(coloring, *w, spec) : false;
  return r;
}

Report cmd_vdw_number(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto res = cvdw_number(o.t, o.L, spec, o.W_max, o.budget);
  Report r = start_report("vdw-number");
  r.doc["spec"] = spec_json(spec);
  r.doc["t"] = o.t;
  r.doc["L"] = o.L;
  r.doc["W_max"] = o.W_max;
  r.doc["budget"] = o.budget;
  const char* status = res.status == CvdwResult::Status::Found     ? "found"
                       : res.status == CvdwResult::Status::Unknown ? "unknown"
                                                                   : "budget_exceeded";
  r.doc["status"] = status;
  r.doc["value"] = res.value ? Json(*res.value) : Json(nullptr);
  r.doc["longest_avoiding"] = res.longest_avoiding;
  r.doc["nodes"] = res.nodes;
  r.doc["extremal"] = res.extremal ? Json(res.extremal->colors()) : Json(nullptr);
  if (res.status == CvdwResult::Status::BudgetExceeded) r.status = kBudget;
  return r;
}

// "h:r,h:r,..."
std::vector<ClosurePart> parse_parts(const std::string& text) {
  std::vector<ClosurePart> parts;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw DomainError("closure part '" + item + "' must be h:r");
    const auto h = parse_int(item.substr(0, colon));
    if (h < 0) throw DomainError("closure scale must be non-negative");
    parts.push_back({static_cast<unsigned>(h), parse_u128(item.substr(colon + 1))});
  }
  return parts;
}

Report cmd_closure(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  const auto parts = parse_parts(o.parts);
  const auto rep = sum_closure_certify(spec, parts);
  Report r = start_report("closure");
  r.doc["spec"] = spec_json(spec);
  Json pj = Json::array();
  for (const auto& p : parts) pj.push_back(Json{{"h", p.scale}, {"r", number(p.value)}});
  r.doc["parts"] = pj;
  Json elements = Json::array();
  for (auto e : rep.elements) elements.push_back(number(e));
  r.doc["elements"] = elements;
  r.doc["status"] = !rep.preconditions_hold() ? "precondition_violated" : rep.certified ? "certified" : "not_certified";
  r.doc["certified"] = rep.certified;
  r.doc["parts_in_set"] = rep.parts_in_set;
  r.doc["scales_disjoint"] = rep.scales_disjoint;
  r.doc["failing_block"] =
      rep.failing_block ? Json::array({rep.failing_block->first, rep.failing_block->second}) : Json(nullptr);
  if (!rep.preconditions_hold()) r.status = kDomain;
  return r;
}

Report cmd_census(const Options& o) {
  const auto spec = DigitSpec::parse(o.spec);
  if (o.set.empty()) throw DomainError("--set is required");
  const auto direction = parse_direction(o.direction);
  const std::optional<std::uint64_t> bound = o.M ? std::optional<std::uint64_t>(o.M) : std::nullopt;
  auto set = IntSet::parse(o.set, bound);
  if (set.max_value() == 0) set = IntSet::parse(o.set, std::uint64_t{o.N} * o.ell);
  const auto census = step_census(set, o.ell, spec, o.N, direction);
  const auto value = density_recurrence_average(set, o.ell, spec, o.N, direction);
  Report r = start_report("census");
  r.doc["spec"] = spec_json(spec);
  r.doc["M"] = set.max_value();
  r.doc["set_size"] = set.size();
  r.doc["ell"] = o.ell;
  r.doc["N"] = o.N;
  r.doc["direction"] = o.direction;
  r.doc["members"] = census.members.size();
  r.doc["density"] = rational_json(census.density);
  r.doc["value"] = rational_json(value);
  Json steps = Json::array();
  r.csv_header = {"n", "k", "count", "x"};
  for (const auto& m : census.members) {
    Json e{{"n", m.n}, {"k", number(m.step)}, {"count", m.count}};
    if (o.witnesses) e["witness"] = witness_json(m.witness);
    steps.push_back(e);
    r.csv_rows.push_back(
        {std::to_string(m.n), to_string(m.step), std::to_string(m.count), std::to_string(m.witness.start)});
  }
  r.doc["steps"] = steps;
  return r;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Integer Cantor sets: enumeration, equidistribution, ergodic averages and Ramsey witnesses", "crl"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  struct Entry {
    CLI::App* sub;
    std::function<Report(const Options&)> fn;
  };
  std::vector<Entry> entries;

  auto add = [&](const char* name, const char* help, std::function<Report(const Options&)> fn) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", o.spec, "digit specification, \"b=3;D=0,2\" or {\"base\":3,\"digits\":[0,2]}")
        ->capture_default_str();
    sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}))
        ->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", o.seed, "seed for randomized suites")->capture_default_str();
    sub->add_option("--kernel", o.kernel, "force a kernel backend")->check(CLI::IsMember({"scalar", "avx2"}));
    entries.push_back({sub, std::move(fn)});
    return sub;
  };

  auto* s = add("enumerate", "List k_0, k_1, ...: the increasing enumeration of the integer Cantor set K_{b,D}",
                cmd_enumerate);
  s->add_option("--count", o.count, "number of elements")->capture_default_str();
  s->add_option("--start", o.start, "first index n")->capture_default_str();

  s = add("rank", "Index n with k_n = m in K_{b,D}, or NotMember", cmd_rank);
  s->add_option("--value,-m", o.value, "integer m")->required();

  s = add("contains", "Whether every base-b digit of m lies in D (membership in K_{b,D})", cmd_contains);
  s->add_option("--value,-m", o.value, "integer m")->required();

  s = add("deltas",
          "Difference sets Delta*_h(k,s): indices n with k_{n+h}-k_n = k and digit-sum jump s, as progressions with "
          "power-of-|D| steps",
          cmd_deltas);
  s->add_option("--h", o.h, "gap h >= 1")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();
  s->add_flag("--indices", o.indices, "include the raw index lists");

  s = add("residues", "Residue distribution pi_q(a): frequencies of k_n mod q over a prefix", cmd_residues);
  s->add_option("--q", o.q, "modulus")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();
  s->add_option("--start", o.start, "first index of the window")->capture_default_str();

  s = add("weyl", "Weyl sum E_{n<N} e^{2 pi i alpha k_n} and its modulus", cmd_weyl);
  s->add_option("--alpha", o.alpha, "frequency: p/q, decimal, sqrt2 or golden")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();
  s->add_flag("--decay", o.decay, "tabulate the modulus at N = 1, 2, 4, ... (Weyl decay table)");

  s = add("discrepancy", "Star discrepancy of {alpha k_n mod 1 : n < N} (uniform distribution mod 1)",
          cmd_discrepancy);
  s->add_option("--alpha", o.alpha, "frequency: p/q, decimal, sqrt2 or golden")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();

  s = add("spectra", "Spectral coefficients gamma_r = E_{n<N} e^{2 pi i r k_n} at rationals r = p/q", cmd_spectra);
  s->add_option("--max-q", o.max_q, "largest denominator")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();

  auto dyn = [&](CLI::App* sub) {
    sub->add_option("--system", o.system, "cyclic:m=M,r=R | torus:alpha=A | bernoulli")->capture_default_str();
    sub->add_option("--observable", o.observable,
                    "indicator:a,b | vector:v0,v1 | trig:m=re[:im];... | interval:lo,hi | coord | "
                    "cylinder:w=W;table=... | const:c")
        ->capture_default_str();
  };

  s = add("ergavg", "Ergodic average E_{n<N} T^{k_n} f along the Cantor set, with the spectral prediction sum_r gamma_r P_r f",
          cmd_ergavg);
  dyn(s);
  s->add_option("--N", o.N, "prefix length")->capture_default_str();

  s = add("window", "Uniform window average E_{M<=n<N} T^{k_n} f", cmd_window);
  dyn(s);
  s->add_option("--M", o.M, "window start")->capture_default_str();
  s->add_option("--N", o.N, "window end")->capture_default_str();

  s = add("progavg", "Average of T^{k_n} f over n in the progression start + t |D|^i below N", cmd_progavg);
  dyn(s);
  s->add_option("--start", o.start, "progression start")->capture_default_str();
  s->add_option("--i", o.i, "step exponent: the step is |D|^i")->capture_default_str();
  s->add_option("--N", o.N, "prefix bound")->capture_default_str();

  s = add("recur", "Multiple recurrence average E_n E_X prod_{j<ell} f(T^{j k_n} x)", cmd_recur);
  dyn(s);
  s->add_option("--ell", o.ell, "number of factors")->capture_default_str();
  s->add_option("--N", o.N, "prefix length")->capture_default_str();
  s->add_option("--min-step", o.min_step, "skip n with k_n below this")->capture_default_str();

  s = add("vdc", "van der Corput inequality |E a_j|^2 <= E_h |E_j a_{j+h} conj(a_j)| + 1/H + H/N on seeded sequences",
          cmd_vdc);
  s->add_option("--N", o.N, "sequence length")->capture_default_str();
  s->add_option("--H", o.H, "comma-separated window sizes")->capture_default_str();
  s->add_option("--trials", o.trials, "random sequences")->capture_default_str();
  s->add_option("--alpha", o.vdc_alpha, "use a_j = e^{2 pi i alpha k_j} instead of random unit sequences")
      ->capture_default_str();

  s = add("vdw-find",
          "Cantor van der Waerden witness: a monochromatic t-term progression with step in K \\ {0} in a coloring",
          cmd_vdw_find);
  s->add_option("--coloring", o.coloring, "color pattern, repeated to length W, e.g. AABB")->required();
  s->add_option("--W", o.W, "coloring length (default: pattern length)");
  s->add_option("--t", o.t, "progression length")->capture_default_str();

  s = add("vdw-number",
          "Cantor van der Waerden number: least W such that every L-coloring of [1,W] has a monochromatic t-term "
          "progression with step in K \\ {0}",
          cmd_vdw_number);
  s->add_option("--t", o.t, "progression length")->capture_default_str();
  s->add_option("--L", o.L, "number of colors")->capture_default_str();
  s->add_option("--W-max", o.W_max, "largest W searched")->capture_default_str();
  s->add_option("--budget", o.budget, "search node budget (exit 3 when exhausted)")->capture_default_str();

  s = add("closure",
          "Sum-closure certificate: every consecutive block sum of k_j = b^{h_j} r_j lies in K \\ {0}", cmd_closure);
  s->add_option("--parts", o.parts, "comma-separated h:r pairs, e.g. 1:2,3:2")->required();

  s = add("census",
          "Density recurrence along K: B = {n < N : A contains an ell-term progression with step k_n} and the average "
          "E_x E_n prod_j 1_A(x - j k_n)",
          cmd_census);
  s->add_option("--set", o.set, "set A: \"q*Z & [lo,hi]\" or a list of integers")->required();
  s->add_option("--ell", o.ell, "progression length")->capture_default_str();
  s->add_option("--N", o.N, "number of steps k_n")->capture_default_str();
  s->add_option("--M", o.M, "ambient interval [1,M] (default: from --set, else N*ell)");
  s->add_option("--direction", o.direction, "progression direction")
      ->check(CLI::IsMember({"forward", "backward"}))
      ->capture_default_str();
  s->add_flag("--witnesses", o.witnesses, "include one progression witness per step");

  std::vector<std::string> argv(args.rbegin(), args.rend() - 1);
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  const Entry* chosen = nullptr;
  for (const auto& e : entries)
    if (e.sub->parsed()) chosen = &e;
  if (!chosen) return kUsage;

  try {
    if (!o.kernel.empty()) kernels::select(kernels::parse_backend(o.kernel));
    if (o.threads) set_thread_count(o.threads);
    const Report r = chosen->fn(o);
    emit(r, o.format, out);
    return r.status;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  } catch (const RangeError& e) {
    err << "error: " << e.what() << '\n';
    return kDomain;
  }
}

}  // namespace crl::cli
