#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qgraph/errors.hpp"
#include "qgraph/green_heat.hpp"
#include "qgraph/inverse.hpp"
#include "qgraph/io.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/trace.hpp"
#include "qgraph/walks.hpp"
#include "report.hpp"

using namespace qgraph;
using cli::Json;
using cli::to_json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

struct Common {
  std::string graph;
  std::string format = "json";
  std::string out;
  std::uint64_t seed = 0;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool random_magnetic = false;
};

GraphDocument load(const Common& c) {
  GraphDocument doc = load_document_file(c.graph);
  if (c.random_magnetic) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> phase(-std::numbers::pi, std::numbers::pi);
    std::vector<double> phases(doc.graph.num_slots());
    for (auto& p : phases) p = phase(rng);
    doc.boundary = apply_magnetic(doc.graph, doc.boundary, phases);
  }
  return doc;
}

Json header(const char* command, const Common& c) {
  Json j;
  j["command"] = command;
  j["graph"] = c.graph;
  return j;
}

// validate

Json run_validate(const Common& c) {
  const auto doc = load(c);
  const auto rep = validate(doc.graph);
  Json j = header("validate", c);
  j["num_vertices"] = rep.num_vertices;
  j["num_internal"] = rep.num_internal;
  j["num_external"] = rep.num_external;
  j["compact"] = rep.compact;
  j["connected"] = rep.connected;
  j["has_tadpoles"] = rep.has_tadpoles;
  j["degree_sum_ok"] = rep.degree_sum_ok;
  j["gauss_bonnet_ok"] = rep.gauss_bonnet_ok;
  j["total_length"] = rep.total_length;
  j["euler_number"] = rep.euler_number;
  j["k_independent"] = doc.boundary.k_independent();
  j["magnetic"] = doc.boundary.has_magnetic();
  Json deg = Json::object();
  for (const auto& v : doc.graph.vertices()) deg[v] = doc.graph.degree(*doc.graph.find_vertex(v));
  j["degrees"] = deg;
  Json bcs = Json::array();
  for (const auto& bc : doc.boundary.vertices) {
    Json b;
    b["vertex"] = doc.graph.vertices()[bc.vertex];
    b["preset"] = to_string(bc.preset);
    b["degree"] = bc.degree();
    b["k_independent"] = is_k_independent(bc);
    bcs.push_back(b);
  }
  j["boundary"] = bcs;
  return j;
}

// scattering-matrix

Json run_scattering(const Common& c, double k, const std::string& vertex) {
  const auto doc = load(c);
  const auto& g = doc.graph;
  Json j = header("scattering-matrix", c);
  j["k"] = k;
  Json slots = Json::array();
  Matrix m;
  if (!vertex.empty()) {
    const auto v = g.find_vertex(vertex);
    if (!v) throw validation_error("unknown vertex '" + vertex + "'");
    m = vertex_scattering(doc.boundary.vertices[*v], cplx{k, 0.0});
    for (std::size_t s : g.star(*v)) slots.push_back(g.edge_id(g.slot_edge(s)));
    j["kind"] = "vertex";
    j["vertex"] = vertex;
    j["k_used"] = k;
    j["shifted"] = false;
  } else {
    const auto sm = scattering_matrix(g, doc.boundary, k);
    m = sm.sigma;
    for (const auto& e : g.external_edges()) slots.push_back(e.id);
    j["kind"] = "external";
    j["k_used"] = sm.k_used;
    j["shifted"] = sm.shifted;
  }
  j["slots"] = slots;
  j["unitarity_defect"] = unitarity_defect(m);
  j["matrix"] = to_json(m);
  Json recs = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      Json e;
      e["row"] = slots[r];
      e["col"] = slots[col];
      e["re"] = m(r, col).real();
      e["im"] = m(r, col).imag();
      recs.push_back(e);
    }
  j["records"] = recs;
  return j;
}

// eigenvalues

Json eigen_json(const Eigenvalue& e) {
  Json j;
  j["k"] = e.k;
  j["lambda"] = e.lambda;
  j["multiplicity"] = e.multiplicity;
  j["kernel_dim"] = e.kernel_dim;
  j["residual"] = e.residual;
  j["candidate"] = e.candidate;
  return j;
}

Json run_eigenvalues(const Common& c, double kmax, double tol) {
  const auto doc = load(c);
  const auto rep = eigenvalues(doc.graph, doc.boundary, kmax, tol);
  Json j = header("eigenvalues", c);
  j["k_max"] = rep.k_max;
  j["tol"] = rep.tol;
  j["compact"] = rep.compact;
  j["zero_modes"] = zero_mode_multiplicity(doc.graph, doc.boundary);
  Json recs = Json::array(), cands = Json::array();
  for (const auto& e : rep.eigenvalues) recs.push_back(eigen_json(e));
  for (const auto& e : rep.candidates) cands.push_back(eigen_json(e));
  j["records"] = recs;
  j["candidates"] = cands;
  return j;
}

// spectral-shift

Json run_spectral_shift(const Common& c, double lmin, double lmax, std::size_t n) {
  if (!(lmin > 0.0) || !(lmax > lmin)) throw validation_error("need 0 < lmin < lmax");
  if (n < 2) throw validation_error("need n >= 2");
  const auto doc = load(c);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lmin + (lmax - lmin) * double(i) / double(n - 1);
  const auto sd = spectral_shift(doc.graph, doc.boundary, grid);
  Json j = header("spectral-shift", c);
  j["zero_modes"] = sd.zero_modes;
  j["phase_at_zero"] = sd.phase_at_zero;
  j["max_phase_jump"] = sd.max_phase_jump;
  Json recs = Json::array();
  for (std::size_t i = 0; i < n; ++i) {
    Json r;
    r["lambda"] = sd.lambda[i];
    r["phase"] = sd.phase[i];
    r["counting"] = sd.counting[i];
    r["xi"] = sd.xi[i];
    r["det_re"] = sd.det_sigma[i].real();
    r["det_im"] = sd.det_sigma[i].imag();
    r["unitarity_defect"] = sd.unitarity_defect[i];
    r["birman_krein_residual"] = sd.birman_krein_residual[i];
    recs.push_back(r);
  }
  j["records"] = recs;
  Json cands = Json::array();
  for (const auto& e : sd.candidates) cands.push_back(eigen_json(e));
  j["candidates"] = cands;
  return j;
}

// green / heat-kernel

struct Points {
  std::string x_edge, y_edge;
  double x = 0.0, y = 0.0;
};

Json point_record(const SeriesResult& r) {
  Json j;
  j["value_re"] = r.value.real();
  j["value_im"] = r.value.imag();
  j["walks_used"] = r.walks_used;
  j["cutoff_length"] = r.cutoff_length;
  j["tail_bound"] = r.tail_bound;
  return j;
}

Json with_points(Json j, const Points& p) {
  j["x_edge"] = p.x_edge;
  j["x"] = p.x;
  j["y_edge"] = p.y_edge;
  j["y"] = p.y;
  return j;
}

Json run_green(const Common& c, cplx k, const Points& p, double eps, const std::string& method) {
  const auto doc = load(c);
  const auto x = make_point(doc.graph, p.x_edge, p.x), y = make_point(doc.graph, p.y_edge, p.y);
  SeriesResult r;
  if (method == "closed")
    r.value = green_closed(doc.graph, doc.boundary, k, x, y);
  else
    r = green_series(doc.graph, doc.boundary, k, x, y, eps);
  Json j = with_points(header("green", c), p);
  j["k"] = to_json(k);
  j["method"] = method;
  j["eps"] = eps;
  j["records"] = Json::array({point_record(r)});
  return j;
}

Json run_heat_kernel(const Common& c, double t, const Points& p, double eps) {
  const auto doc = load(c);
  const auto x = make_point(doc.graph, p.x_edge, p.x), y = make_point(doc.graph, p.y_edge, p.y);
  const auto r = heat_kernel(doc.graph, doc.boundary, t, x, y, eps);
  Json j = with_points(header("heat-kernel", c), p);
  j["t"] = t;
  j["eps"] = eps;
  j["records"] = Json::array({point_record(r)});
  return j;
}

// heat-trace / trace-compare

Json run_heat_trace(const Common& c, const std::vector<double>& t, double eps, CompareSign sign,
                    const std::string& side) {
  const auto doc = load(c);
  Json j = header("heat-trace", c);
  j["compare"] = to_string(sign);
  j["side"] = side;
  j["eps"] = eps;
  Json recs = Json::array();
  if (side == "cycles") {
    const auto ct = heat_trace_cycles(doc.graph, doc.boundary, t, eps, sign, c.threads);
    j["constant"] = ct.constant;
    j["cutoff_length"] = ct.cutoff_length;
    j["cycles_used"] = ct.cycles_used;
    for (std::size_t i = 0; i < t.size(); ++i) {
      Json r;
      r["t"] = t[i];
      r["value_re"] = ct.value[i].real();
      r["value_im"] = ct.value[i].imag();
      r["weyl"] = ct.weyl[i];
      r["cycle_sum_re"] = ct.cycle_sum[i].real();
      r["cycle_sum_im"] = ct.cycle_sum[i].imag();
      r["tail_bound"] = ct.tail_bound[i];
      recs.push_back(r);
    }
  } else {
    const auto st = heat_trace_spectral(doc.graph, doc.boundary, t, eps, sign);
    j["k_max"] = st.k_max;
    for (std::size_t i = 0; i < t.size(); ++i) {
      Json r;
      r["t"] = t[i];
      r["value"] = st.value[i];
      r["error_bound"] = st.error_bound[i];
      recs.push_back(r);
    }
  }
  j["records"] = recs;
  return j;
}

Json run_trace_compare(const Common& c, const std::vector<double>& t, double eps, CompareSign sign) {
  const auto doc = load(c);
  const auto rep = compare_traces(doc.graph, doc.boundary, t, eps, sign, c.threads);
  Json j = header("trace-compare", c);
  j["compare"] = to_string(sign);
  j["eps"] = eps;
  j["ok"] = rep.ok;
  j["total_length"] = doc.graph.total_length();
  j["constant"] = rep.cycles.constant;
  j["cutoff_length"] = rep.cycles.cutoff_length;
  j["cycles_used"] = rep.cycles.cycles_used;
  j["spectral_k_max"] = rep.spectral.k_max;
  Json recs = Json::array();
  for (std::size_t i = 0; i < t.size(); ++i) {
    Json r;
    r["t"] = t[i];
    r["cycle_side"] = rep.cycles.value[i].real();
    r["cycle_side_im"] = rep.cycles.value[i].imag();
    r["spectral_side"] = rep.spectral.value[i];
    r["weyl"] = rep.cycles.weyl[i];
    r["cycle_sum"] = rep.cycles.cycle_sum[i].real();
    r["tail_bound"] = rep.cycles.tail_bound[i];
    r["spectral_error"] = rep.spectral.error_bound[i];
    r["discrepancy"] = rep.abs_discrepancy[i];
    r["rel_discrepancy"] = rep.rel_discrepancy[i];
    r["failed"] = static_cast<bool>(rep.failed[i]);
    recs.push_back(r);
  }
  j["records"] = recs;
  return j;
}

// cycles

Json run_cycles(const Common& c, double lambda, bool skip_zero) {
  const auto doc = load(c);
  const auto cycles = enumerate_cycles(doc.graph, doc.boundary, lambda, c.threads);
  Json j = header("cycles", c);
  j["lambda"] = lambda;
  Json recs = Json::array();
  for (const auto& cy : cycles) {
    if (skip_zero && cy.zero_weight()) continue;
    Json r;
    r["length"] = cy.length;
    r["weight_re"] = cy.weight.real();
    r["weight_im"] = cy.weight.imag();
    r["primitive"] = cy.primitive();
    r["power"] = cy.power;
    r["representative"] = cycle_representative(doc.graph, cy);
    recs.push_back(r);
  }
  j["count"] = recs.size();
  j["records"] = recs;
  return j;
}

// length-spectrum / check-hypotheses

Json hypothesis_json(const MetricGraph& g, const HypothesisReport& h) {
  Json j;
  Json lengths = Json::array();
  for (const auto& e : g.internal_edges()) lengths.push_back(e.length);
  j["lengths"] = lengths;
  j["relation_search_done"] = h.relation_search_done;
  j["lengths_rationally_independent"] = h.lengths_rationally_independent;
  j["relation"] = h.relation;
  j["relation_residual"] = h.relation_residual;
  j["search_bound"] = h.search_bound;
  j["all_s_entries_nonzero"] = h.all_s_entries_nonzero;
  Json zeros = Json::array();
  for (const auto& z : h.zero_entries) {
    Json e;
    e["vertex"] = z.vertex;
    e["row"] = z.row;
    e["col"] = z.col;
    zeros.push_back(e);
  }
  j["zero_entries"] = zeros;
  j["degree_two_standard"] = h.degree_two_standard;
  j["notes"] = h.notes;
  return j;
}

Json run_check_hypotheses(const Common& c) {
  const auto doc = load(c);
  Json j = header("check-hypotheses", c);
  const Json h = hypothesis_json(doc.graph, check_inverse_hypotheses(doc.graph, doc.boundary));
  for (const auto& [key, v] : h.items()) j[key] = v;
  return j;
}

struct LengthOptions {
  std::string source = "spectral";
  double omega_max = 10.0, sigma = 0.0, kmax = 400.0, rel_floor = 0.05, match_tol = 0.02;
};

Json run_length_spectrum(const Common& c, const LengthOptions& o) {
  if (!(o.omega_max > 0.0)) throw validation_error("omega-max must be positive");
  const auto doc = load(c);
  const auto& g = doc.graph;
  Json j = header("length-spectrum", c);
  j["source"] = o.source;
  j["omega_max"] = o.omega_max;

  const auto truth = reduced_length_spectrum(g, doc.boundary, o.omega_max, c.threads);
  Json gt = Json::array();
  for (const auto& gr : truth) {
    Json r;
    r["length"] = gr.length;
    r["amplitude"] = to_json(gr.amplitude);
    r["cycles"] = gr.cycles;
    gt.push_back(r);
  }

  Json recovered = Json::array(), matching = Json::array();
  if (o.source == "spectral") {
    const RecoveryOptions opt{o.omega_max, o.sigma, o.rel_floor};
    LengthRecovery rec;
    if (g.is_compact()) {
      rec = recover_length_spectrum(eigenvalues(g, doc.boundary, o.kmax, 1e-10), opt);
    } else {
      const ScatteringPhase phase(g, doc.boundary, o.kmax);
      const auto spec = eigenvalues(g, doc.boundary, o.kmax, 1e-10);
      rec = recover_length_spectrum(phase, zero_mode_multiplicity(g, doc.boundary), spec.candidates, opt);
    }
    j["k_max"] = rec.k_max;
    j["sigma"] = rec.sigma;
    j["background"] = rec.background;
    j["floor"] = rec.floor;
    j["jump_at_zero"] = rec.jump_at_zero;
    j["length_estimate"] = rec.length_estimate;
    for (const auto& p : rec.peaks) {
      Json r;
      r["omega"] = p.omega;
      r["amplitude"] = p.amplitude;
      r["height"] = p.height;
      recovered.push_back(r);
    }
    for (const auto& gr : truth) {
      const LengthPeak* best = nullptr;
      for (const auto& p : rec.peaks)
        if (!best || std::abs(p.omega - gr.length) < std::abs(best->omega - gr.length)) best = &p;
      if (!best || std::abs(best->omega - gr.length) > o.match_tol) continue;
      Json m;
      m["length"] = gr.length;
      m["omega"] = best->omega;
      m["delta"] = best->omega - gr.length;
      m["amplitude_true"] = gr.amplitude.real();
      m["amplitude_recovered"] = best->amplitude;
      matching.push_back(m);
    }
  }
  j["match_tol"] = o.match_tol;
  j["ground_truth"] = gt;
  j["recovered"] = recovered;
  j["matching"] = matching;
  j["hypothesis_report"] = hypothesis_json(g, check_inverse_hypotheses(g, doc.boundary));
  // tabular view for CSV: recovered peaks when present, else ground truth
  Json recs = Json::array();
  if (o.source == "spectral") {
    recs = recovered;
  } else {
    for (const auto& gr : truth) {
      Json r;
      r["length"] = gr.length;
      r["amplitude_re"] = gr.amplitude.real();
      r["amplitude_im"] = gr.amplitude.imag();
      r["cycles"] = gr.cycles;
      recs.push_back(r);
    }
  }
  j["records"] = recs;
  return j;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Numeric: return "numeric";
  }
  return "unknown";
}

/// CSV header used when a command produces no records.
std::vector<std::string> empty_columns(const std::string& command, const std::string& side) {
  if (command == "eigenvalues") return {"k", "lambda", "multiplicity", "kernel_dim", "residual", "candidate"};
  if (command == "cycles") return {"length", "weight_re", "weight_im", "primitive", "power", "representative"};
  if (command == "scattering-matrix") return {"row", "col", "re", "im"};
  if (command == "length-spectrum")
    return side == "cycles" ? std::vector<std::string>{"length", "amplitude_re", "amplitude_im", "cycles"}
                            : std::vector<std::string>{"omega", "amplitude", "height"};
  return {};
}

int fail(int code, const std::string& kind, const std::string& tag, const std::string& message) {
  Json j;
  j["error"] = kind;
  j["code"] = tag;
  j["message"] = message;
  j["exit_code"] = code;
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral computations on metric graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", common.out, "Write the report to PATH instead of standard output");
  app.add_option("--seed", common.seed, "Seed for randomized options");
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--random-magnetic", common.random_magnetic, "Apply seeded random magnetic phases to every slot");

  auto graph_arg = [&](CLI::App* sub) {
    sub->add_option("graph", common.graph, "Graph file (JSON)")->required()->check(CLI::ExistingFile);
  };
  std::function<Json()> job;

  auto* validate_cmd = app.add_subcommand("validate", "Structural report of a graph file");
  graph_arg(validate_cmd);
  validate_cmd->callback([&] { job = [&] { return run_validate(common); }; });

  double sm_k = 0.0;
  std::string sm_vertex;
  auto* sm = app.add_subcommand("scattering-matrix", "External scattering matrix, or a vertex matrix with --vertex");
  graph_arg(sm);
  sm->add_option("--k", sm_k)->required()->check(CLI::PositiveNumber);
  sm->add_option("--vertex", sm_vertex);
  sm->callback([&] { job = [&] { return run_scattering(common, sm_k, sm_vertex); }; });

  double ev_kmax = 0.0, ev_tol = 1e-10;
  auto* ev = app.add_subcommand("eigenvalues", "Eigenvalues with k <= kmax");
  graph_arg(ev);
  ev->add_option("--kmax", ev_kmax)->required()->check(CLI::PositiveNumber);
  ev->add_option("--tol", ev_tol)->check(CLI::PositiveNumber);
  ev->callback([&] { job = [&] { return run_eigenvalues(common, ev_kmax, ev_tol); }; });

  double ss_lmin = 0.0, ss_lmax = 0.0;
  std::size_t ss_n = 200;
  auto* ss = app.add_subcommand("spectral-shift", "Scattering phase and spectral shift on a uniform lambda grid");
  graph_arg(ss);
  ss->add_option("--lmin", ss_lmin)->required();
  ss->add_option("--lmax", ss_lmax)->required();
  ss->add_option("--n", ss_n);
  ss->callback([&] { job = [&] { return run_spectral_shift(common, ss_lmin, ss_lmax, ss_n); }; });

  auto point_opts = [](CLI::App* sub, Points& p) {
    sub->add_option("--x-edge", p.x_edge)->required();
    sub->add_option("--x", p.x)->required();
    sub->add_option("--y-edge", p.y_edge)->required();
    sub->add_option("--y", p.y)->required();
  };

  Points gp;
  double g_kre = 0.0, g_kim = 0.0, g_eps = 1e-10;
  std::string g_method = "series";
  auto* green = app.add_subcommand("green", "Green's function r(x, y; k) for Im k > 0");
  graph_arg(green);
  green->add_option("--k", g_kre, "Re k")->required();
  green->add_option("--k-im", g_kim, "Im k")->required()->check(CLI::PositiveNumber);
  green->add_option("--eps", g_eps)->check(CLI::PositiveNumber);
  green->add_option("--method", g_method)->check(CLI::IsMember({"series", "closed"}));
  point_opts(green, gp);
  green->callback([&] { job = [&] { return run_green(common, cplx{g_kre, g_kim}, gp, g_eps, g_method); }; });

  Points hp;
  double h_t = 0.0, h_eps = 1e-10;
  auto* hk = app.add_subcommand("heat-kernel", "Heat kernel p_t(x, y)");
  graph_arg(hk);
  hk->add_option("--t", h_t)->required()->check(CLI::PositiveNumber);
  hk->add_option("--eps", h_eps)->check(CLI::PositiveNumber);
  point_opts(hk, hp);
  hk->callback([&] { job = [&] { return run_heat_kernel(common, h_t, hp, h_eps); }; });

  std::vector<double> ht_t;
  double ht_eps = 1e-10;
  std::string ht_compare = "neumann", ht_side = "cycles";
  auto* ht = app.add_subcommand("heat-trace", "One side of the heat-trace identity");
  graph_arg(ht);
  ht->add_option("--t", ht_t)->required()->expected(1, -1)->check(CLI::PositiveNumber);
  ht->add_option("--eps", ht_eps)->check(CLI::PositiveNumber);
  ht->add_option("--compare", ht_compare)->check(CLI::IsMember({"neumann", "dirichlet"}));
  ht->add_option("--side", ht_side)->check(CLI::IsMember({"cycles", "spectral"}));
  ht->callback([&] {
    job = [&] { return run_heat_trace(common, ht_t, ht_eps, compare_sign_from_string(ht_compare), ht_side); };
  });

  std::vector<double> tc_t;
  double tc_eps = 1e-9;
  std::string tc_compare = "neumann";
  auto* tc = app.add_subcommand("trace-compare", "Both sides of the heat-trace identity");
  graph_arg(tc);
  tc->add_option("--t", tc_t)->required()->expected(1, -1)->check(CLI::PositiveNumber);
  tc->add_option("--eps", tc_eps)->check(CLI::PositiveNumber);
  tc->add_option("--compare", tc_compare)->check(CLI::IsMember({"neumann", "dirichlet"}));
  tc->callback([&] {
    job = [&] { return run_trace_compare(common, tc_t, tc_eps, compare_sign_from_string(tc_compare)); };
  });

  double cy_lambda = 0.0;
  bool cy_skip = false;
  auto* cy = app.add_subcommand("cycles", "Cycles with metric length <= lambda");
  graph_arg(cy);
  cy->add_option("--lambda", cy_lambda)->required()->check(CLI::PositiveNumber);
  cy->add_flag("--skip-zero", cy_skip, "Omit cycles of weight zero");
  cy->callback([&] { job = [&] { return run_cycles(common, cy_lambda, cy_skip); }; });

  LengthOptions lo;
  auto* ls = app.add_subcommand("length-spectrum", "Reduced length spectrum and its recovery from spectral data");
  graph_arg(ls);
  ls->add_option("--source", lo.source)->check(CLI::IsMember({"cycles", "spectral"}));
  ls->add_option("--omega-max", lo.omega_max);
  ls->add_option("--sigma", lo.sigma, "Window width in omega; 0 picks 5/kmax");
  ls->add_option("--kmax", lo.kmax)->check(CLI::PositiveNumber);
  ls->add_option("--rel-floor", lo.rel_floor);
  ls->add_option("--match-tol", lo.match_tol)->check(CLI::PositiveNumber);
  ls->callback([&] { job = [&] { return run_length_spectrum(common, lo); }; });

  auto* ch = app.add_subcommand("check-hypotheses", "Hypotheses of the inverse length-spectrum problem");
  graph_arg(ch);
  ch->callback([&] { job = [&] { return run_check_hypotheses(common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kExitInput, "usage", "invalid-arguments", e.what());
  }

  try {
    const Json doc = job();
    std::ostringstream os;
    if (common.format == "csv")
      cli::write_csv(os, doc, empty_columns(doc["command"].get<std::string>(), lo.source));
    else
      cli::write_json(os, doc);
    if (common.out.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream f(common.out, std::ios::binary);
      if (!f) return fail(kExitInput, "io", "cannot-write", "cannot open " + common.out);
      f << os.str();
    }
  } catch (const Error& e) {
    return fail(e.is_numeric() ? kExitNumeric : kExitInput, kind_name(e.kind()), e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(kExitNumeric, "internal", "internal-error", e.what());
  }
  return 0;
}
