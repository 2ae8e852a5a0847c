// hm: command-line front end for the higgsmorse library.
//
//   hm enumerate --group gl(2) --genus 2 --degree 1
//   hm census --group sp(2n,R) --n 3 --genus 2 --toledo max
//   hm flow --rank 2 --size 16 --seed 7 --tol 1e-6
//
// Exit status: 0 ok, 2 validation error, 3 numerical failure, 4 consistency failure.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "higgsmorse/higgsmorse.hpp"

using namespace higgsmorse;

namespace {

struct RunConfig {
  std::string command;
  std::string group = "gl(n)";
  std::string n, p, q, genus, degree, toledo, trunc, ell, n0, exponents;
  std::string size, rank, seed, tol, max_steps, spacing, dt, underflow, state_out;
  std::string out, format;
};

long to_long(const std::string &flag, const std::string &v) {
  try {
    std::size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception &) {
  }
  throw ValidationError("--" + flag + ": expected an integer, got '" + v + "'");
}

double to_double(const std::string &flag, const std::string &v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception &) {
  }
  throw ValidationError("--" + flag + ": expected a number, got '" + v + "'");
}

long need_long(const std::string &flag, const std::string &v) {
  require(!v.empty(), "missing --" + flag);
  return to_long(flag, v);
}

long opt_long(const std::string &flag, const std::string &v, long fallback) { return v.empty() ? fallback : to_long(flag, v); }

/// Output sink: --out path or stdout.
class Sink {
public:
  explicit Sink(const std::string &path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      require(static_cast<bool>(*file_), "cannot open output file: " + path);
    }
  }
  std::ostream &os() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

GroupDatum resolve_group(const RunConfig &c) {
  const int n = static_cast<int>(opt_long("n", c.n, 0));
  if (c.group == "u(p,q)")
    return parse_group(c.group, n, static_cast<int>(need_long("p", c.p)), static_cast<int>(need_long("q", c.q)));
  const bool templated = c.group.find("(n)") != std::string::npos || c.group == "sl(n,R)" || c.group == "sp(2n,R)";
  if (templated) require(n >= 1, "--n is required for group " + c.group);
  return parse_group(c.group, n, 0, 0);
}

/// --toledo (integer or "max") wins over --degree.
long resolve_degree(const RunConfig &c, const GroupDatum &g, long genus) {
  if (!c.toledo.empty()) {
    if (c.toledo == "max") {
      require(g.kind == GroupKind::Sp2nR, "--toledo max needs a group of Hermitian type sp(2n,R)");
      return milnor_wood(g.n, genus).hi;
    }
    return to_long("toledo", c.toledo);
  }
  return need_long("degree", c.degree);
}

Enumeration run_enumeration(const GroupDatum &g, const CurveContext &ctx, long d) {
  switch (g.kind) {
  case GroupKind::GLnC:
    if (g.n == 2) return enumerate_gl2_critical(ctx, d);
    if (g.n == 3) return enumerate_gl3_critical(ctx, d);
    throw ValidationError("enumeration supports gl(2) and gl(3), not " + g.name);
  case GroupKind::Sp2nR: return enumerate_sp2nR_minima(g.n, ctx, d);
  default: throw ValidationError("enumeration is not available for " + g.name);
  }
}

void emit_strata(std::ostream &os, const Enumeration &e, const CurveContext *ctx, OutputFormat f) {
  auto index_of = [&](const CriticalStratum &s) -> std::optional<IndexReport> {
    if (!ctx) return std::nullopt;
    return morse_index(s.hodge, *ctx);
  };
  if (f == OutputFormat::csv) os << "kind," << kStrataCsvHeader << (ctx ? ",local_minimum" : "") << "\n";
  for (const auto *list : {&e.strata, &e.borderline}) {
    const char *kind = list == &e.strata ? "stratum" : "borderline";
    for (const auto &s : *list) {
      const auto idx = index_of(s);
      const IndexReport *ip = idx ? &*idx : nullptr;
      const int minimum = ctx ? int(is_local_minimum(s.hodge, *ctx).is_minimum) : -1; // -1: not computed
      switch (f) {
      case OutputFormat::records:
        write_stratum_record(os, s, ip, kind);
        if (minimum >= 0) os << "local_minimum " << minimum << "\n";
        break;
      case OutputFormat::csv: {
        std::ostringstream line;
        write_stratum_csv(line, s, ip);
        std::string text = line.str();
        text.pop_back();
        os << kind << "," << text << (minimum >= 0 ? "," + std::to_string(minimum) : "") << "\n";
        break;
      }
      case OutputFormat::json_lines: {
        auto j = stratum_json(s, ip);
        j["kind"] = kind;
        if (minimum >= 0) j["local_minimum"] = minimum == 1;
        os << j.dump() << "\n";
        break;
      }
      }
    }
  }
  for (const auto &note : e.notes) {
    if (f == OutputFormat::records) os << "note " << note << "\n";
    if (f == OutputFormat::json_lines) os << nlohmann::json{{"kind", "note"}, {"text", note}}.dump() << "\n";
  }
}

int cmd_enumerate(const RunConfig &c, bool with_index) {
  const GroupDatum g = resolve_group(c);
  const long genus = need_long("genus", c.genus);
  const CurveContext ctx(genus);
  const long d = resolve_degree(c, g, genus);
  const auto fmt = parse_format(c.format.empty() ? "records" : c.format);
  Sink sink(c.out);
  emit_strata(sink.os(), run_enumeration(g, ctx, d), with_index ? &ctx : nullptr, fmt);
  return 0;
}

int cmd_assemble(const RunConfig &c) {
  const GroupDatum g = resolve_group(c);
  require(g.kind == GroupKind::GLnC && g.n == 2, "assemble supports gl(2) only");
  const CurveContext ctx(need_long("genus", c.genus));
  const long d = need_long("degree", c.degree);
  require(!c.n0.empty(), "assemble needs --n0 (Poincare polynomial of the phi = 0 stratum)");
  const Polynomial n0 = Polynomial::parse(c.n0);
  const auto fmt = parse_format(c.format.empty() ? "records" : c.format);
  const Enumeration e = enumerate_gl2_critical(ctx, d);
  std::vector<std::pair<long, Polynomial>> terms;
  Sink sink(c.out);
  auto &os = sink.os();
  if (fmt == OutputFormat::csv) os << "label,parameter,index,poincare\n";
  for (const auto &s : e.strata) {
    long index = 0;
    Polynomial p = n0;
    if (!s.is_phi_zero) {
      const auto rep = morse_index(s.hodge, ctx);
      if (!rep.exact) throw ConsistencyError("assemble: unresolved index on " + s.description);
      index = rep.index;
      p = gl2_critical_poincare(ctx, s);
    }
    terms.emplace_back(index, p);
    const std::string par = s.parameter ? std::to_string(*s.parameter) : "";
    if (fmt == OutputFormat::csv) os << label_name(s.label) << "," << par << "," << index << "," << p.to_string() << "\n";
    if (fmt == OutputFormat::records)
      os << "term " << label_name(s.label) << (par.empty() ? "" : " l=" + par) << " index " << index << " poincare " << p.to_string() << "\n";
    if (fmt == OutputFormat::json_lines)
      os << nlohmann::json{{"label", label_name(s.label)}, {"parameter", par}, {"index", index}, {"poincare", p.to_string()}}.dump()
         << "\n";
  }
  const Polynomial total = poincare_assemble(terms);
  if (fmt == OutputFormat::csv) os << "total,,," << total.to_string() << "\n";
  if (fmt == OutputFormat::records) os << "total " << total.to_string() << "\nend\n";
  if (fmt == OutputFormat::json_lines) os << nlohmann::json{{"label", "total"}, {"poincare", total.to_string()}}.dump() << "\n";
  return 0;
}

int cmd_census(const RunConfig &c) {
  const GroupDatum g = resolve_group(c);
  require(g.kind == GroupKind::Sp2nR, "census supports sp(2n,R)");
  const long genus = need_long("genus", c.genus);
  const long d = resolve_degree(c, g, genus);
  const long maxd = milnor_wood(g.n, genus).hi;
  require(std::abs(d) <= maxd, "census: |d| exceeds the Milnor-Wood bound n(g-1) = " + std::to_string(maxd));
  ComponentReport r;
  if (std::abs(d) == maxd) {
    if (g.n >= 3) r = count_sp2nR_maximal(g.n, genus);
    else if (g.n == 2) r = count_sp4_maximal(genus);
    else throw ValidationError("census: maximal Sp(2,R) is not covered");
    r.toledo = d;
  } else {
    r = count_sp2nR_nonmaximal(g.n, genus, d);
  }
  Sink sink(c.out);
  write_component_report(sink.os(), r, parse_format(c.format.empty() ? "csv" : c.format));
  return 0;
}

int cmd_dwww(const RunConfig &c) {
  const CurveContext ctx(need_long("genus", c.genus));
  const long l = need_long("ell", c.ell);
  const long deg_e = need_long("degree", c.degree);
  const long order = opt_long("trunc", c.trunc, 20);
  const auto s = dwww_difference(l, deg_e, ctx, order);
  const auto fmt = parse_format(c.format.empty() ? "csv" : c.format);
  Sink sink(c.out);
  auto &os = sink.os();
  if (fmt == OutputFormat::csv) {
    os << "k,first,second,difference\n";
    for (std::size_t k = 0; k <= s.first.order(); ++k)
      os << k << "," << s.first[k].str() << "," << s.second[k].str() << "," << s.difference[k].str() << "\n";
  } else if (fmt == OutputFormat::records) {
    os << "dwww l=" << l << " degE=" << deg_e << " g=" << ctx.genus << "\nshift " << s.shift << "\nfirst " << s.first.to_string()
       << "\nsecond " << s.second.to_string() << "\ndifference " << s.difference.to_string() << "\nend\n";
  } else {
    os << nlohmann::json{{"l", l}, {"degE", deg_e}, {"g", ctx.genus}, {"shift", s.shift}, {"first", s.first.to_string()},
                         {"second", s.second.to_string()}, {"difference", s.difference.to_string()}}
              .dump()
       << "\n";
  }
  return 0;
}

int cmd_flow(const RunConfig &c) {
  const int rank = static_cast<int>(opt_long("rank", c.rank, 2));
  const int size = static_cast<int>(opt_long("size", c.size, 16));
  const std::uint64_t seed = static_cast<std::uint64_t>(opt_long("seed", c.seed, 1));
  const double spacing = c.spacing.empty() ? 1.0 : to_double("spacing", c.spacing);
  const FlowGroup tag = parse_flow_group(c.group == "gl(n)" ? "gl" : c.group);
  FlowOptions o;
  if (!c.tol.empty()) o.tolerance = to_double("tol", c.tol);
  o.max_steps = opt_long("max-steps", c.max_steps, o.max_steps);
  if (!c.dt.empty()) o.initial_step = to_double("dt", c.dt);
  if (!c.underflow.empty()) o.underflow = to_double("underflow", c.underflow);
  require(rank >= 1 && rank <= 4, "--rank must be in 1..4");
  require(size >= 2, "--size must be >= 2");
  FlowState s = random_state(LatticeGeometry(size, spacing), rank, seed, tag);
  const auto fmt = parse_format(c.format.empty() ? "csv" : c.format);
  FlowTrace tr;
  try {
    tr = heat_flow_run(s, o);
  } catch (const NumericalError &) {
    std::ofstream dump((c.out.empty() ? std::string("hm-flow") : c.out) + ".dump");
    write_state(dump, s);
    throw;
  }
  Sink sink(c.out);
  auto &os = sink.os();
  if (fmt == OutputFormat::csv) {
    write_trace_csv(os, tr);
  } else if (fmt == OutputFormat::records) {
    for (const auto &st : tr.steps)
      os << "step " << full_precision(st.time) << " " << full_precision(st.energy) << " " << full_precision(st.gradient_norm) << " "
         << full_precision(st.step) << "\n";
    os << "converged " << (tr.converged ? 1 : 0) << "\n";
    for (const auto &cl : tr.limit_report.clusters)
      os << "cluster " << full_precision(cl.mean) << " spread " << full_precision(cl.spread) << " multiplicity " << cl.multiplicity << "\n";
    os << "end\n";
  } else {
    for (const auto &st : tr.steps)
      os << nlohmann::json{{"time", st.time}, {"energy", st.energy}, {"gradient_norm", st.gradient_norm}, {"step", st.step}}.dump()
         << "\n";
  }
  if (!c.state_out.empty()) {
    std::ofstream so(c.state_out);
    require(static_cast<bool>(so), "cannot open state output: " + c.state_out);
    write_state(so, s);
  }
  std::cerr << "flow converged=" << (tr.converged ? 1 : 0) << " steps=" << tr.steps.size() - 1 << " energy="
            << full_precision(tr.steps.back().energy) << " gradient_norm=" << full_precision(tr.steps.back().gradient_norm) << "\n";
  return 0;
}

/// Internal consistency checks: Hitchin base dimension and Milnor-Wood.
int cmd_check(const RunConfig &c) {
  const long n = need_long("n", c.n);
  const long genus = need_long("genus", c.genus);
  const GroupDatum g = group_datum(GroupKind::Sp2nR, static_cast<int>(n));
  HitchinBase b;
  if (c.exponents.empty()) {
    b = hitchin_base_dim(g, genus);
  } else {
    std::vector<long> exps;
    std::stringstream ss(c.exponents);
    for (std::string tok; std::getline(ss, tok, ',');) exps.push_back(to_long("exponents", tok));
    b = hitchin_base_dim(g, genus, exps);
  }
  const auto mw = milnor_wood(n, genus);
  Sink sink(c.out);
  auto &os = sink.os();
  os << "check,value\n";
  for (const auto &[p, h0] : b.table) os << "h0(K^" << p << ")," << h0 << "\n";
  os << "hitchin_base_dim," << b.dimension << "\n";
  os << "milnor_wood," << mw.lo << ".." << mw.hi << "\n";
  return 0;
}

int dispatch(const RunConfig &c) {
  if (c.command == "enumerate") return cmd_enumerate(c, false);
  if (c.command == "index") return cmd_enumerate(c, true);
  if (c.command == "assemble") return cmd_assemble(c);
  if (c.command == "census") return cmd_census(c);
  if (c.command == "dwww") return cmd_dwww(c);
  if (c.command == "flow") return cmd_flow(c);
  if (c.command == "check") return cmd_check(c);
  throw ValidationError("unknown command '" + c.command + "' (enumerate, index, assemble, census, dwww, flow, check)");
}

std::string one_line(std::string s) {
  for (auto &ch : s)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return s;
}

int fail(int code, const char *kind, const std::string &what) {
  std::cerr << "error=" << kind << " exit=" << code << " message=" << one_line(what) << "\n";
  return code;
}

} // namespace

int main(int argc, char **argv) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"higgsmorse: Hodge-bundle strata, Morse indices, component counts and YMH flows"};
  app.add_option("command", cfg.command, "enumerate | index | assemble | census | dwww | flow | check");
  struct Flag {
    const char *name;
    std::string *target;
    const char *help;
  };
  const std::vector<Flag> flags = {
      {"group", &cfg.group, "gl(n), sl(n), sl(n,R), sp(2n,R), u(p,q) or a literal such as sp(4,R); flow: gl, sl, sl2r, sp2r"},
      {"n", &cfg.n, "rank parameter n"},
      {"p", &cfg.p, "U(p,q): p"},
      {"q", &cfg.q, "U(p,q): q"},
      {"genus", &cfg.genus, "genus g"},
      {"degree", &cfg.degree, "degree d (dwww: deg E)"},
      {"toledo", &cfg.toledo, "Toledo invariant, integer or 'max'"},
      {"trunc", &cfg.trunc, "series truncation order"},
      {"ell", &cfg.ell, "dwww: deg L1"},
      {"n0", &cfg.n0, "assemble: Poincare polynomial of the phi = 0 stratum"},
      {"exponents", &cfg.exponents, "check: comma-separated invariant degrees overriding 2,4,...,2n"},
      {"size", &cfg.size, "flow: lattice size N"},
      {"spacing", &cfg.spacing, "flow: lattice spacing"},
      {"rank", &cfg.rank, "flow: bundle rank"},
      {"seed", &cfg.seed, "flow: random seed"},
      {"tol", &cfg.tol, "flow: gradient-norm tolerance"},
      {"max-steps", &cfg.max_steps, "flow: step limit"},
      {"dt", &cfg.dt, "flow: initial step (default 1e-2 spacing^2)"},
      {"underflow", &cfg.underflow, "flow: smallest step before giving up (default 1e-12)"},
      {"state-out", &cfg.state_out, "flow: write the final state here"},
      {"out", &cfg.out, "output path (default stdout)"},
      {"format", &cfg.format, "csv | records | json-lines"},
  };
  std::vector<CLI::Option *> opts;
  for (const auto &f : flags) opts.push_back(app.add_option(std::string("--") + f.name, *f.target, f.help));
  app.add_option("--config", config_path, "config file (key = value, [section] headers); flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    return fail(2, "validation", e.what());
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      require(static_cast<bool>(in), "cannot open config file: " + config_path);
      for (const auto &[full_key, value] : parse_config(in)) {
        std::string key = full_key.substr(full_key.find('.') == std::string::npos ? 0 : full_key.find('.') + 1);
        for (auto &ch : key)
          if (ch == '_') ch = '-';
        if (key == "command") {
          if (cfg.command.empty()) cfg.command = value;
          continue;
        }
        bool known = false;
        for (std::size_t i = 0; i < flags.size(); ++i)
          if (key == flags[i].name) {
            known = true;
            if (opts[i]->count() == 0) *flags[i].target = value;
          }
        require(known, "config: unknown key '" + full_key + "'");
      }
    }
    require(!cfg.command.empty(), "missing command (enumerate, index, assemble, census, dwww, flow, check)");
    return dispatch(cfg);
  } catch (const ValidationError &e) {
    return fail(2, "validation", e.what());
  } catch (const NumericalError &e) {
    return fail(3, "numerical", e.what());
  } catch (const ConsistencyError &e) {
    return fail(4, "consistency", e.what());
  }
}
