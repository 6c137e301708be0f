#include "zfwedge/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "zfwedge/scenario.hpp"

namespace zfw {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

std::string status_name(int code) {
  switch (code) {
    case kExitPass: return "pass";
    case kExitCheckFailed: return "fail";
    case kExitIndeterminate: return "indeterminate";
    default: return "config_error";
  }
}

// Failure outranks indeterminate.
int combine(int a, int b) {
  if (a == kExitCheckFailed || b == kExitCheckFailed) return kExitCheckFailed;
  if (a == kExitIndeterminate || b == kExitIndeterminate) return kExitIndeterminate;
  return kExitPass;
}

void write_text(CommandResult& r, const RunConfig& c, const std::string& name, const std::string& text) {
  std::filesystem::create_directories(c.out_dir);
  const std::filesystem::path p = std::filesystem::path(c.out_dir) / name;
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << text;
  r.files.push_back(p.string());
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Quadrature-decided status: a small value with a large error estimate decides nothing.
int commutator_status(const WeakCommResult& r, double tol, double tol_err) {
  if (r.normalized >= tol) return kExitCheckFailed;
  if (r.normalized_error >= tol_err) return kExitIndeterminate;
  return kExitPass;
}

std::string fusion_label(const ScatteringData& s, int a, int b) {
  const FusionProcess* p = s.fusion(a, b);
  std::string lhs = "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  return p ? lhs + "->" + std::to_string(p->result) : lhs + " no fusion";
}

bool involves_elementary(const ScatteringData& s, const FusionProcess& p) {
  const int u = s.elementary, ub = s.conj(u);
  return p.left == u || p.left == ub || p.right == u || p.right == ub;
}

// |Re R| small against |R| and Im R > 0
bool positive_imaginary(cplx R, double tol) { return std::abs(R.real()) <= tol * std::abs(R) && R.imag() > 0.0; }

int cmd_fusion_table(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  json rows = json::array();
  std::string csv = "process,left,right,result,angle_left,angle_right,angle,mass_left,mass_right,mass_result,"
                    "residue_re,residue_im,mass_residual\n";
  int code = kExitPass;
  for (int a = 1; a <= s.count(); ++a) {
    for (int b = a; b <= s.count(); ++b) {
      json row{{"process", fusion_label(s, a, b)}, {"left", a}, {"right", b}};
      const FusionProcess* p = s.fusion(a, b);
      if (!p) {
        row["fuses"] = false;
        csv += row["process"].get<std::string>() + "," + std::to_string(a) + "," + std::to_string(b) +
               ",,,,,,,,,,\n";
        rows.push_back(row);
        continue;
      }
      const double ma = s.mass(a), mb = s.mass(b), mc = s.mass(p->result);
      const cplx R = s.fusion_residue(a, b, p->result);
      const double mass_res =
          std::abs(mc * mc - (ma * ma + mb * mb + 2 * ma * mb * std::cos(p->angle()))) / (mc * mc);
      const bool mass_ok = mass_res <= c.tol_alg;
      const bool residue_ok = !involves_elementary(s, *p) || positive_imaginary(R, c.tol_alg);
      if (!mass_ok || !residue_ok) code = kExitCheckFailed;
      row["fuses"] = true;
      row["result"] = p->result;
      row["angle_left"] = p->angle_left;
      row["angle_right"] = p->angle_right;
      row["angle"] = p->angle();
      row["masses"] = {ma, mb, mc};
      row["residue"] = cplx_json(R);
      row["mass_residual"] = mass_res;
      row["residue_in_positive_imaginary_axis"] = positive_imaginary(R, c.tol_alg);
      rows.push_back(row);
      csv += row["process"].get<std::string>() + "," + std::to_string(a) + "," + std::to_string(b) + "," +
             std::to_string(p->result) + "," + fmt(p->angle_left) + "," + fmt(p->angle_right) + "," +
             fmt(p->angle()) + "," + fmt(ma) + "," + fmt(mb) + "," + fmt(mc) + "," + fmt(R.real()) + "," +
             fmt(R.imag()) + "," + fmt(mass_res) + "\n";
      out.summary.push_back(row["process"].get<std::string>() + "  angle " + fmt(p->angle()) + "  R " +
                            format_cplx(R));
    }
  }
  out.report["results"] = {{"rows", rows}};
  write_text(out, c, "fusion_table.csv", csv);
  return code;
}

std::vector<cplx> bootstrap_points(const RunConfig& c) {
  std::mt19937_64 rng(c.seed);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * double(rng() >> 11) * 0x1.0p-53; };
  std::vector<cplx> pts;
  for (int i = 0; i < c.bootstrap_points; ++i) pts.emplace_back(u(-10.0, 10.0), u(0.05, kPi - 0.05));
  return pts;
}

int cmd_axioms(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  GridSpec grid;
  grid.tolerance = c.tol_alg;
  std::vector<VerificationReport> reports = check_axioms(s, grid);
  for (VerificationReport& r : check_relations(s, c.tol_alg)) reports.push_back(std::move(r));
  VerificationReport boot;
  boot.check_id = "bootstrap_identity";
  boot.tolerance = c.tol_alg;
  boot.grid = bootstrap_points(c);
  boot.max_residual = bootstrap_identity_residual(s, boot.grid);
  boot.finish();
  reports.push_back(boot);

  int code = kExitPass;
  std::string csv = "check_id,max_residual,tolerance,passed\n";
  for (const VerificationReport& r : reports) {
    if (!r.passed) code = kExitCheckFailed;
    csv += r.check_id + "," + fmt(r.max_residual) + "," + fmt(r.tolerance) + "," + (r.passed ? "1" : "0") + "\n";
    out.summary.push_back((r.passed ? "ok    " : "FAIL  ") + r.check_id + "  " + fmt(r.max_residual));
  }
  out.report["results"] = {{"reports", reports_to_json(reports, false)}};
  if (c.format == "csv") write_text(out, c, "axioms.csv", csv);
  return code;
}

int cmd_residues(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  json rows = json::array();
  std::string csv = "process,pole_im,order,value_re,value_im,circle_re,circle_im,agreement,passed\n";
  int code = kExitPass;
  for (const FusionProcess& p : s.fusions()) {
    const Residue r = residue_at(s, p.left, p.right, cplx(0.0, p.angle()));
    const double agree = std::abs(r.value - r.circle_value) / std::max(std::abs(r.value), 1e-300);
    bool ok = r.order == 1 && r.consistent && agree <= c.tol_residue;
    if (involves_elementary(s, p)) ok = ok && positive_imaginary(r.value, c.tol_alg);
    if (!ok) code = kExitCheckFailed;
    json row{{"process", fusion_label(s, p.left, p.right)},
             {"pole", cplx_json(r.pole_location)},
             {"order", r.order},
             {"value", cplx_json(r.value)},
             {"circle_value", cplx_json(r.circle_value)},
             {"relative_agreement", agree},
             {"passed", ok}};
    if (s.family == Family::ZN && p.left == 1 && p.right == 1) {
      const cplx closed(0.0, 2 * std::sin(2 * kPi / s.N));
      row["closed_form"] = cplx_json(closed);
      row["closed_form_residual"] = std::abs(r.value - closed) / std::abs(closed);
    }
    rows.push_back(row);
    csv += row["process"].get<std::string>() + "," + fmt(r.pole_location.imag()) + "," + std::to_string(r.order) +
           "," + fmt(r.value.real()) + "," + fmt(r.value.imag()) + "," + fmt(r.circle_value.real()) + "," +
           fmt(r.circle_value.imag()) + "," + fmt(agree) + "," + (ok ? "1" : "0") + "\n";
    out.summary.push_back((ok ? "ok    " : "FAIL  ") + row["process"].get<std::string>() + "  R " +
                          format_cplx(r.value));
  }
  out.report["results"] = {{"rows", rows}};
  if (c.format == "csv") write_text(out, c, "residues.csv", csv);
  return code;
}

WeakCommOptions comm_options(const RunConfig& c) {
  WeakCommOptions o;
  o.quad = c.quad;
  return o;
}

int cmd_weak_comm(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  if (c.nmax < 1 || c.nmax > kMaxParticles) throw ConfigError("--nmax must be between 1 and 3");
  const WeakCommOptions o = comm_options(c);
  json runs = json::array();
  std::string csv = "n,value_re,value_im,error_estimate,scale,normalized,normalized_error,status\n";
  int code = kExitPass;
  for (int n = 1; n <= c.nmax; ++n) {
    const CommutatorCase k = draw_commutator_case(s, n, c.seed + 1000003ull * n, c.zero_factor);
    const WeakCommResult r = run_case(k, o);
    const int st = commutator_status(r, c.tol_comm, c.tol_err);
    code = combine(code, st);
    json m = commutator_manifest(s, k, o, r);
    m["n"] = n;
    m["status"] = status_name(st);
    runs.push_back(m);
    csv += std::to_string(n) + "," + fmt(r.value.real()) + "," + fmt(r.value.imag()) + "," + fmt(r.error) + "," +
           fmt(r.scale) + "," + fmt(r.normalized) + "," + fmt(r.normalized_error) + "," + status_name(st) + "\n";
    out.summary.push_back("n=" + std::to_string(n) + "  normalized " + fmt(r.normalized) + "  error " +
                          fmt(r.normalized_error) + "  " + status_name(st));
  }
  out.report["results"] = {{"runs", runs}};
  if (c.format == "csv") write_text(out, c, "weak_comm.csv", csv);
  return code;
}

int cmd_counterexample(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  const WeakCommOptions o = comm_options(c);
  const CommutatorCase bare = pair_component_case(s, c.seed, false);
  const CommutatorCase zero = pair_component_case(s, c.seed, true);
  const WeakCommResult rb = run_case(bare, o), rz = run_case(zero, o);

  // without the zero factor the pairing has to stay visibly away from zero
  int bare_st = kExitPass;
  if (rb.normalized <= c.counterexample_floor) bare_st = kExitCheckFailed;
  else if (rb.normalized - rb.normalized_error <= c.counterexample_floor) bare_st = kExitIndeterminate;
  const int zero_st = commutator_status(rz, c.tol_comm, c.tol_err);

  json mb = commutator_manifest(s, bare, o, rb), mz = commutator_manifest(s, zero, o, rz);
  mb["status"] = status_name(bare_st);
  mb["required"] = "normalized > " + fmt(c.counterexample_floor);
  mz["status"] = status_name(zero_st);
  mz["required"] = "normalized < " + fmt(c.tol_comm);
  out.report["results"] = {{"without_zero_factor", mb}, {"with_zero_factor", mz}};
  out.summary.push_back("without zero factor  normalized " + fmt(rb.normalized) + "  " + status_name(bare_st));
  out.summary.push_back("with zero factor     normalized " + fmt(rz.normalized) + "  " + status_name(zero_st));
  if (c.format == "csv") {
    std::string csv = "case,normalized,normalized_error,status\n";
    csv += "without_zero_factor," + fmt(rb.normalized) + "," + fmt(rb.normalized_error) + "," +
           status_name(bare_st) + "\n";
    csv += "with_zero_factor," + fmt(rz.normalized) + "," + fmt(rz.normalized_error) + "," + status_name(zero_st) +
           "\n";
    write_text(out, c, "z4_counterexample.csv", csv);
  }
  return combine(bare_st, zero_st);
}

int cmd_grid_dump(const ScatteringData& s, const RunConfig& c, CommandResult& out) {
  const GridSpec g;
  std::string csv = "left,right,re,im,value_re,value_im,value_abs\n";
  std::size_t count = 0, poles = 0;
  for (int a = 1; a <= s.count(); ++a) {
    for (int b = 1; b <= s.count(); ++b) {
      for (int i = 0; i < g.re_count; ++i) {
        const double x = g.re_min + (g.re_max - g.re_min) * i / (g.re_count - 1) + g.re_offset;
        for (int j = 0; j < g.im_count; ++j) {
          const cplx z(x, kPi * (j + 0.5) / g.im_count);
          std::string value = ",,";
          try {
            const cplx v = s.S(a, b, z);
            value = fmt(v.real()) + "," + fmt(v.imag()) + "," + fmt(std::abs(v));
          } catch (const PoleHit&) {
            ++poles;
          }
          csv += std::to_string(a) + "," + std::to_string(b) + "," + fmt(z.real()) + "," + fmt(z.imag()) + "," +
                 value + "\n";
          ++count;
        }
      }
    }
  }
  write_text(out, c, "grid_dump.csv", csv);
  out.report["results"] = {{"points", count}, {"pole_hits", poles}};
  out.summary.push_back(std::to_string(count) + " points written");
  return kExitPass;
}

}  // namespace

BlaschkeSpec parse_blaschke(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw ConfigError("--blaschke expects kind:k:re:im, got " + text);
  try {
    std::size_t used = 0;
    BlaschkeSpec b;
    b.kind = std::stoi(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
    b.k = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    b.B = cplx(std::stod(parts[2]), std::stod(parts[3]));
    return b;
  } catch (const std::logic_error&) {
    throw ConfigError("--blaschke expects kind:k:re:im, got " + text);
  }
}

ScatteringData build_model(const RunConfig& c, int default_N) {
  const int N = c.N.value_or(default_N);
  const Family fam = parse_family(c.family);
  if (!c.blaschke.empty() && fam != Family::CDD) throw ConfigError("--blaschke applies to the cdd model only");
  if (c.B && fam != Family::Toda) throw ConfigError("--B applies to the toda model only");
  switch (fam) {
    case Family::ZN: return build_zn(N, c.m1);
    case Family::CDD:
      if (c.blaschke.empty()) throw ConfigError("the cdd model needs at least one --blaschke factor");
      return build_cdd(N, c.m1, c.blaschke);
    case Family::Toda: return build_toda(N, c.m1, c.B.value_or(0.0));
  }
  throw ConfigError("unknown model family");
}

json config_to_json(const RunConfig& c, const ScatteringData& s) {
  return {{"model", model_to_json(s)},
          {"tolerances",
           {{"algebraic", c.tol_alg},
            {"quadrature", c.tol_quad},
            {"residue", c.tol_residue},
            {"commutator", c.tol_comm},
            {"error", c.tol_err},
            {"counterexample_floor", c.counterexample_floor}}},
          {"seed", c.seed},
          {"quad", quad_to_json(c.quad)},
          {"nmax", c.nmax},
          {"zero_factor", c.zero_factor},
          {"bootstrap_points", c.bootstrap_points}};
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"fusion-table", "axioms", "residues", "weak-comm", "z4-counterexample",
                                              "grid-dump"};
  return names;
}

CommandResult run_command(const std::string& name, const RunConfig& c) {
  using Cmd = int (*)(const ScatteringData&, const RunConfig&, CommandResult&);
  Cmd cmd = nullptr;
  int default_N = 3;
  if (name == "fusion-table") cmd = cmd_fusion_table;
  else if (name == "axioms") cmd = cmd_axioms;
  else if (name == "residues") cmd = cmd_residues;
  else if (name == "weak-comm") cmd = cmd_weak_comm;
  else if (name == "grid-dump") cmd = cmd_grid_dump;
  else if (name == "z4-counterexample") {
    cmd = cmd_counterexample;
    default_N = 4;
  }
  if (!cmd) throw ConfigError("unknown command " + name);
  if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be json or csv");

  const auto t0 = std::chrono::steady_clock::now();
  const ScatteringData s = build_model(c, default_N);
  CommandResult out;
  out.report["schema"] = 1;
  out.report["command"] = name;
  out.report["config"] = config_to_json(c, s);
  out.exit_code = cmd(s, c, out);
  out.report["status"] = status_name(out.exit_code);
  out.report["exit_code"] = out.exit_code;
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.report["metadata"] = {{"timestamp", utc_now()}, {"elapsed_seconds", elapsed}};
  std::string file = name;
  for (char& ch : file) ch = ch == '-' ? '_' : ch;
  write_text(out, c, file + ".json", out.report.dump(2) + "\n");
  return out;
}

std::string stable_dump(const json& report) {
  json copy = report;
  copy.erase("metadata");
  return copy.dump();
}

}  // namespace zfw
