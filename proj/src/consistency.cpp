#include "sdlab/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "sdlab/errors.hpp"

namespace sdlab {

double esc(const EdgeMask& a, const EdgeMask& b) {
  if (a.size() != b.size()) throw AlignmentError("esc: masks differ in length");
  if (a.size() == 0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

ReExplanationRecord make_record(EdgeMask m1, EdgeMask m2) {
  if (m1.size() != m2.size()) throw AlignmentError("record: masks differ in length");
  ReExplanationRecord rec;
  rec.delta_s.resize(m1.size());
  for (std::size_t i = 0; i < m1.size(); ++i) rec.delta_s[i] = std::abs(m1[i] - m2[i]);
  rec.esc = esc(m1, m2);
  rec.m1 = std::move(m1);
  rec.m2 = std::move(m2);
  return rec;
}

ReExplanationRecord re_explain(const SiGnnModel& model, const Graph& graph) {
  EdgeMask m1 = compute_edge_scores(model, graph, EdgeMask::ones(graph.num_edges()));
  EdgeMask m2 = compute_edge_scores(model, graph, m1);
  return make_record(std::move(m1), std::move(m2));
}

std::vector<ReExplanationRecord> re_explain_all(const SiGnnModel& model, const Dataset& dataset,
                                                std::span<const std::size_t> indices, Exec exec) {
  std::vector<ReExplanationRecord> out(indices.size());
  for_each_index(indices.size(), exec,
                 [&](std::size_t k) { out[k] = re_explain(model, dataset.graphs[indices[k]]); });
  return out;
}

ContextVariation context_variation(const EdgeNeighborhoodIndex& index, std::span<const double> delta_s) {
  if (index.size() != delta_s.size()) throw AlignmentError("context_variation: length mismatch");
  ContextVariation cv;
  cv.delta_c.resize(delta_s.size());
  for (std::size_t e = 0; e < index.size(); ++e) {
    if (index[e].empty()) continue;
    double s = 0.0;
    for (std::size_t f : index[e]) s += delta_s[f];
    cv.delta_c[e] = s / static_cast<double>(index[e].size());
  }
  return cv;
}

ContextVariation context_variation(const Graph& graph, std::span<const double> delta_s) {
  check_aligned(graph, delta_s.size());
  return context_variation(edge_neighbors(graph), delta_s);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AlignmentError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> midranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) r[order[k]] = mid;
    i = j;
  }
  return r;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AlignmentError("spearman: length mismatch");
  const auto rx = midranks(x);
  const auto ry = midranks(y);
  return pearson(rx, ry);
}

namespace {

// Number of ordered pairs tied within each run of equal values (sorted input).
template <class Eq>
double tied_pairs(std::size_t n, Eq equal) {
  double t = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && equal(i, j)) ++j;
    const double run = static_cast<double>(j - i);
    t += run * (run - 1.0) / 2.0;
    i = j;
  }
  return t;
}

// Stable merge sort counting inversions (strictly decreasing pairs).
double sort_count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0.0;
  const std::size_t mid = lo + (hi - lo) / 2;
  double swaps = sort_count_swaps(v, buf, lo, mid) + sort_count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<double>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::optional<double> kendall(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AlignmentError("kendall: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  const double n0 = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[order[a]] == x[order[b]]; });
  const double n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
  });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buf(n);
  const double swaps = sort_count_swaps(ys, buf, 0, n);
  const double n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });
  const double denom = std::sqrt((n0 - n1) * (n0 - n2));
  if (!(denom > 0.0)) return std::nullopt;
  // concordant - discordant = n0 - n1 - n2 + n3 - 2 * swaps
  return std::clamp((n0 - n1 - n2 + n3 - 2.0 * swaps) / denom, -1.0, 1.0);
}

CorrelationTriple correlate(std::span<const double> x, std::span<const double> y) {
  return {pearson(x, y), spearman(x, y), kendall(x, y), x.size()};
}

namespace {

struct Pools {
  std::vector<double> ds, dc;
};

void collect(const Graph& g, const ReExplanationRecord& rec, Pools& imp, Pools& unimp) {
  if (!g.has_ground_truth()) throw PreconditionError("correlation_report requires ground-truth labels");
  check_aligned(g, rec.delta_s.size());
  const auto cv = context_variation(g, rec.delta_s);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (!cv.delta_c[e]) continue;
    Pools& p = (*g.gt_edge_labels())[e] ? imp : unimp;
    p.ds.push_back(rec.delta_s[e]);
    p.dc.push_back(*cv.delta_c[e]);
  }
}

std::optional<double> mean_defined(const std::vector<std::optional<double>>& v) {
  double s = 0.0;
  std::size_t n = 0;
  for (const auto& x : v) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return s / static_cast<double>(n);
}

CorrelationTriple average_triples(const std::vector<CorrelationTriple>& ts) {
  std::vector<std::optional<double>> p, s, k;
  CorrelationTriple out;
  for (const auto& t : ts) {
    p.push_back(t.pearson);
    s.push_back(t.spearman);
    k.push_back(t.kendall);
    out.count += t.count;
  }
  out.pearson = mean_defined(p);
  out.spearman = mean_defined(s);
  out.kendall = mean_defined(k);
  return out;
}

}  // namespace

CorrelationReport correlation_report(std::span<const Graph* const> graphs,
                                     std::span<const ReExplanationRecord> records, CorrelationMode mode) {
  if (graphs.size() != records.size()) throw AlignmentError("one record per graph required");
  CorrelationReport rep;
  if (mode == CorrelationMode::pooled) {
    Pools imp, unimp;
    for (std::size_t k = 0; k < graphs.size(); ++k) collect(*graphs[k], records[k], imp, unimp);
    rep.important = correlate(imp.ds, imp.dc);
    rep.unimportant = correlate(unimp.ds, unimp.dc);
    return rep;
  }
  std::vector<CorrelationTriple> imp_t, unimp_t;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    Pools imp, unimp;
    collect(*graphs[k], records[k], imp, unimp);
    imp_t.push_back(correlate(imp.ds, imp.dc));
    unimp_t.push_back(correlate(unimp.ds, unimp.dc));
  }
  rep.important = average_triples(imp_t);
  rep.unimportant = average_triples(unimp_t);
  return rep;
}

CorrelationReport correlation_report(const SiGnnModel& model, const Dataset& dataset, SplitPart split,
                                     CorrelationMode mode) {
  const auto& idx = dataset.indices(split);
  const auto records = re_explain_all(model, dataset, idx);
  std::vector<const Graph*> graphs;
  for (std::size_t i : idx) graphs.push_back(&dataset.graphs[i]);
  return correlation_report(graphs, records, mode);
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void write_scatter(std::ostream& out, std::span<const std::size_t> graph_ids,
                   std::span<const Graph* const> graphs, std::span<const ReExplanationRecord> records,
                   std::span<const std::vector<std::string>> edge_states) {
  if (graphs.size() != records.size() || graphs.size() != graph_ids.size()) {
    throw AlignmentError("write_scatter: inputs differ in length");
  }
  const bool with_state = !edge_states.empty();
  if (with_state && edge_states.size() != graphs.size()) throw AlignmentError("one state list per graph");
  out << "graph_id,edge_id,m1,m2,m1_sym,m2_sym,gt_label,delta_s,delta_c" << (with_state ? ",state" : "")
      << '\n';
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const Graph& g = *graphs[k];
    const auto& rec = records[k];
    const auto m1s = symmetrize(g, rec.m1.values());
    const auto m2s = symmetrize(g, rec.m2.values());
    const auto cv = context_variation(g, rec.delta_s);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      out << graph_ids[k] << ',' << e << ',' << fmt_double(rec.m1[e]) << ',' << fmt_double(rec.m2[e]) << ','
          << fmt_double(m1s[e]) << ',' << fmt_double(m2s[e]) << ',';
      if (g.has_ground_truth()) out << static_cast<int>((*g.gt_edge_labels())[e]);
      out << ',' << fmt_double(rec.delta_s[e]) << ',';
      if (cv.delta_c[e]) out << fmt_double(*cv.delta_c[e]);
      if (with_state) out << ',' << edge_states[k].at(e);
      out << '\n';
    }
  }
}

void scatter_export(const SiGnnModel& model, const Dataset& dataset, SplitPart split,
                    const std::filesystem::path& path) {
  const auto& idx = dataset.indices(split);
  const auto records = re_explain_all(model, dataset, idx);
  std::vector<const Graph*> graphs;
  for (std::size_t i : idx) graphs.push_back(&dataset.graphs[i]);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_scatter(out, idx, graphs, records);
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace sdlab
