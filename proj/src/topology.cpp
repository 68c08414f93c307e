/*
 * Copyright (c) 2026, The kset-workbench Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kset/topology.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <functional>
#include <unordered_map>

#include "kset/engine.hpp"
#include "kset/knowledge.hpp"
#include "kset/protocols.hpp"

namespace kset {

int SimplicialComplex::add_vertex(const std::string& label) {
  const auto it = index_.find(label);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(labels_.size());
  labels_.push_back(label);
  index_.emplace(label, id);
  simplexes_.insert(Simplex{id});
  return id;
}

std::optional<int> SimplicialComplex::find(const std::string& label) const {
  const auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void SimplicialComplex::add_simplex(Simplex s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.empty()) return;
  if (s.size() > 24) throw TopologyError("simplex too large");
  for (int v : s)
    if (v < 0 || v >= vertex_count()) throw TopologyError("unknown vertex id " + std::to_string(v));
  if (simplexes_.count(s)) return;
  const std::uint32_t full = (1u << s.size()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    Simplex face;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (mask >> i & 1u) face.push_back(s[i]);
    simplexes_.insert(std::move(face));
  }
}

void SimplicialComplex::add_simplex_by_labels(const std::vector<std::string>& labels) {
  Simplex s;
  for (const auto& l : labels) s.push_back(add_vertex(l));
  add_simplex(std::move(s));
}

std::vector<Simplex> SimplicialComplex::facets() const {
  // A simplex is maximal iff no vertex can be added to it inside the complex.
  std::vector<std::vector<int>> cofaces(labels_.size());
  for (const auto& s : simplexes_)
    if (s.size() == 2) {
      cofaces[static_cast<std::size_t>(s[0])].push_back(s[1]);
      cofaces[static_cast<std::size_t>(s[1])].push_back(s[0]);
    }
  std::vector<Simplex> out;
  for (const auto& s : simplexes_) {
    bool maximal = true;
    for (int w : cofaces[static_cast<std::size_t>(s[0])]) {
      if (std::binary_search(s.begin(), s.end(), w)) continue;
      Simplex bigger = s;
      bigger.insert(std::upper_bound(bigger.begin(), bigger.end(), w), w);
      if (simplexes_.count(bigger)) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(s);
  }
  return out;
}

int SimplicialComplex::dimension() const {
  int d = -1;
  for (const auto& s : simplexes_) d = std::max(d, static_cast<int>(s.size()) - 1);
  return d;
}

bool SimplicialComplex::is_pure() const {
  const int d = dimension();
  for (const auto& f : facets())
    if (static_cast<int>(f.size()) - 1 != d) return false;
  return true;
}

bool SimplicialComplex::is_closed() const {
  for (const auto& s : simplexes_) {
    if (s.size() < 2) continue;
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex face;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (i != drop) face.push_back(s[i]);
      if (!simplexes_.count(face)) return false;
    }
  }
  return true;
}

std::vector<std::uint64_t> SimplicialComplex::f_vector() const {
  std::vector<std::uint64_t> f(static_cast<std::size_t>(dimension() + 1), 0);
  for (const auto& s : simplexes_) ++f[s.size() - 1];
  return f;
}

std::int64_t SimplicialComplex::euler_characteristic() const {
  std::int64_t chi = 0;
  for (const auto& s : simplexes_) chi += (s.size() % 2 == 1) ? 1 : -1;
  return chi;
}

std::vector<std::string> SimplicialComplex::labels_of(const Simplex& s) const {
  std::vector<std::string> out;
  for (int v : s) out.push_back(label(v));
  return out;
}

SimplicialComplex simplex_complex(const std::vector<std::string>& labels) {
  SimplicialComplex c;
  c.add_simplex_by_labels(labels);
  return c;
}

SimplicialComplex boundary(const std::vector<std::string>& labels) {
  if (labels.empty()) throw TopologyError("boundary of the empty simplex");
  SimplicialComplex c;
  if (labels.size() == 1) return c;
  for (std::size_t drop = 0; drop < labels.size(); ++drop) {
    std::vector<std::string> face;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (i != drop) face.push_back(labels[i]);
    c.add_simplex_by_labels(face);
  }
  return c;
}

namespace {

void require_vertex(const SimplicialComplex& c, int v) {
  if (v < 0 || v >= c.vertex_count()) throw TopologyError("unknown vertex id " + std::to_string(v));
}

// Copies the listed simplexes into a fresh complex, keeping labels.
SimplicialComplex sub_complex(const SimplicialComplex& c, const std::vector<Simplex>& simplexes) {
  SimplicialComplex out;
  for (const auto& s : simplexes) out.add_simplex_by_labels(c.labels_of(s));
  return out;
}

}  // namespace

SimplicialComplex star(const SimplicialComplex& c, int v) {
  require_vertex(c, v);
  std::vector<Simplex> keep;
  for (const auto& s : c.simplexes())
    if (std::binary_search(s.begin(), s.end(), v)) keep.push_back(s);
  return sub_complex(c, keep);
}

SimplicialComplex link(const SimplicialComplex& c, int v) {
  require_vertex(c, v);
  std::vector<Simplex> keep;
  for (const auto& s : c.simplexes()) {
    if (!std::binary_search(s.begin(), s.end(), v) || s.size() == 1) continue;
    Simplex rest;
    for (int w : s)
      if (w != v) rest.push_back(w);
    keep.push_back(std::move(rest));
  }
  return sub_complex(c, keep);
}

SimplicialComplex join(const SimplicialComplex& a, const SimplicialComplex& b) {
  for (int v = 0; v < a.vertex_count(); ++v)
    if (b.find(a.label(v))) throw TopologyError("join needs disjoint vertex sets; shared vertex " + a.label(v));
  SimplicialComplex out;
  for (const auto& s : a.simplexes()) out.add_simplex_by_labels(a.labels_of(s));
  for (const auto& s : b.simplexes()) out.add_simplex_by_labels(b.labels_of(s));
  for (const auto& x : a.simplexes())
    for (const auto& y : b.simplexes()) {
      auto labels = a.labels_of(x);
      const auto more = b.labels_of(y);
      labels.insert(labels.end(), more.begin(), more.end());
      out.add_simplex_by_labels(labels);
    }
  return out;
}

namespace {

// Rank over the two-element field of a matrix given as sparse rows of
// column indices. Rows are packed into 64-bit words and reduced against
// pivots keyed by their lowest set column.
std::size_t gf2_rank(const std::vector<std::vector<std::size_t>>& rows, std::size_t columns) {
  const std::size_t words = (columns + 63) / 64;
  std::unordered_map<std::size_t, std::vector<std::uint64_t>> pivots;
  std::vector<std::uint64_t> row(words);
  for (const auto& sparse : rows) {
    std::fill(row.begin(), row.end(), 0);
    for (std::size_t c : sparse) row[c / 64] ^= 1ull << (c % 64);
    for (;;) {
      std::size_t lead = columns;
      for (std::size_t w = 0; w < words; ++w)
        if (row[w]) {
          lead = w * 64 + static_cast<std::size_t>(std::countr_zero(row[w]));
          break;
        }
      if (lead == columns) break;
      const auto it = pivots.find(lead);
      if (it == pivots.end()) {
        pivots.emplace(lead, row);
        break;
      }
      for (std::size_t w = lead / 64; w < words; ++w) row[w] ^= it->second[w];
    }
  }
  return pivots.size();
}

}  // namespace

std::vector<int> betti_mod2(const SimplicialComplex& c, int max_dim) {
  std::vector<int> out(static_cast<std::size_t>(std::max(max_dim + 1, 0)), 0);
  const int dim = c.dimension();
  if (dim < 0) return out;
  // Index simplexes by dimension.
  std::vector<std::map<Simplex, std::size_t>> by_dim(static_cast<std::size_t>(dim + 1));
  for (const auto& s : c.simplexes()) {
    auto& m = by_dim[s.size() - 1];
    m.emplace(s, m.size());
  }
  // rank[q] is the rank of the boundary map from q-simplexes; q = 0 is the
  // augmentation onto the field, of rank one for a nonempty complex.
  std::vector<std::size_t> rank(static_cast<std::size_t>(dim + 2), 0);
  rank[0] = 1;
  const int top = std::min(dim, max_dim + 1);
  for (int q = 1; q <= top; ++q) {
    std::vector<std::vector<std::size_t>> rows;
    rows.reserve(by_dim[static_cast<std::size_t>(q)].size());
    for (const auto& [s, idx] : by_dim[static_cast<std::size_t>(q)]) {
      std::vector<std::size_t> r;
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        Simplex face;
        for (std::size_t i = 0; i < s.size(); ++i)
          if (i != drop) face.push_back(s[i]);
        r.push_back(by_dim[static_cast<std::size_t>(q - 1)].at(face));
      }
      rows.push_back(std::move(r));
    }
    rank[static_cast<std::size_t>(q)] = gf2_rank(rows, by_dim[static_cast<std::size_t>(q - 1)].size());
  }
  for (int q = 0; q <= std::min(dim, max_dim); ++q) {
    const auto f = static_cast<std::int64_t>(by_dim[static_cast<std::size_t>(q)].size());
    out[static_cast<std::size_t>(q)] = static_cast<int>(f - static_cast<std::int64_t>(rank[static_cast<std::size_t>(q)]) -
                                                        static_cast<std::int64_t>(rank[static_cast<std::size_t>(q + 1)]));
  }
  return out;
}

bool euler_consistent(const SimplicialComplex& c) {
  const int dim = c.dimension();
  if (dim < 0) return true;
  const auto betti = betti_mod2(c, dim);
  std::int64_t alt = 0;
  for (int q = 0; q <= dim; ++q) alt += (q % 2 == 0 ? 1 : -1) * betti[static_cast<std::size_t>(q)];
  return c.euler_characteristic() - 1 == alt;
}

// ------------------------------------------------------------ protocol complex

namespace {

std::string vertex_label(const View& view) {
  std::string out = "p" + std::to_string(view.owner().process) + ":";
  char buf[16];
  bool first = true;
  for (std::uint32_t w : view.key()) {
    std::snprintf(buf, sizeof buf, first ? "%x" : ".%x", w);
    out += buf;
    first = false;
  }
  return out;
}

class ComplexBuilder {
 public:
  ComplexBuilder(int time, const std::string& protocol) : rule_(make_protocol(protocol)) { pc_.time = time; }

  void add(const Adversary& a) {
    if (!params_) {
      params_ = a.params;
    } else if (params_->n != a.params.n || params_->t != a.params.t || params_->k != a.params.k ||
               params_->d_vals != a.params.d_vals) {
      throw TopologyError("adversaries in a protocol complex must share parameters");
    }
    int horizon = pc_.time;
    if (rule_->uniform()) horizon = std::max(horizon, a.params.t / a.params.k + 2);
    const RunAnalysis run(a, horizon);
    const DecisionVector decisions = decide(*rule_, run);
    Simplex s;
    for (int p = 0; p < a.n(); ++p) {
      const NodeId node{p, pc_.time};
      if (!run.graph().active(node)) continue;
      const int id = pc_.complex.add_vertex(vertex_label(run.view(node)));
      if (static_cast<std::size_t>(id) == pc_.process.size()) {
        int min_hc = kNever;
        for (int l = 0; l <= pc_.time; ++l) min_hc = std::min(min_hc, run.knowledge(NodeId{p, l})->summary.hc);
        const auto& d = decisions[static_cast<std::size_t>(p)];
        pc_.process.push_back(p);
        pc_.hc.push_back(run.knowledge(node)->summary.hc);
        pc_.min_hc.push_back(min_hc);
        pc_.decision.push_back(d && d->time <= pc_.time ? d : std::nullopt);
      }
      s.push_back(id);
    }
    pc_.complex.add_simplex(std::move(s));
    ++pc_.runs;
  }

  ProtocolComplex finish() {
    if (pc_.runs == 0) throw TopologyError("protocol complex of an empty adversary set");
    return std::move(pc_);
  }

 private:
  std::unique_ptr<DecisionRule> rule_;
  std::optional<SystemParams> params_;
  ProtocolComplex pc_;
};

}  // namespace

ProtocolComplex protocol_complex(const std::vector<Adversary>& adversaries, int time, const std::string& protocol) {
  ComplexBuilder b(time, protocol);
  for (const auto& a : adversaries) b.add(a);
  return b.finish();
}

ProtocolComplex protocol_complex(const Enumerator& adversaries, int time, const std::string& protocol) {
  ComplexBuilder b(time, protocol);
  adversaries.for_each([&](const Adversary& a) { return b.add(a), true; });
  return b.finish();
}

HomologyProxyReport homology_proxy(const ProtocolComplex& pc, int threshold, int max_dim) {
  HomologyProxyReport r;
  // The empty complex carries reduced homology in degree -1, so an empty
  // link (an isolated vertex) does not count as acyclic.
  auto acyclic = [max_dim](const SimplicialComplex& c) {
    if (c.dimension() < 0) return false;
    const auto b = betti_mod2(c, max_dim);
    return std::all_of(b.begin(), b.end(), [](int x) { return x == 0; });
  };
  // Stars and links are closures of the facets through a vertex, so index
  // facets by vertex once instead of scanning every simplex per vertex.
  std::vector<std::vector<Simplex>> through(static_cast<std::size_t>(pc.complex.vertex_count()));
  for (const auto& f : pc.complex.facets())
    for (int v : f) through[static_cast<std::size_t>(v)].push_back(f);
  for (int v = 0; v < pc.complex.vertex_count(); ++v) {
    ++r.vertices;
    const auto& facets = through[static_cast<std::size_t>(v)];
    SimplicialComplex st, lk;
    for (const auto& f : facets) {
      st.add_simplex_by_labels(pc.complex.labels_of(f));
      Simplex rest;
      for (int w : f)
        if (w != v) rest.push_back(w);
      if (!rest.empty()) lk.add_simplex_by_labels(pc.complex.labels_of(rest));
    }
    const bool lnk = acyclic(lk);
    if (pc.min_hc[static_cast<std::size_t>(v)] >= threshold) {
      ++r.qualifying;
      if (lnk) ++r.qualifying_link_acyclic;
      if (!acyclic(st)) {
        if (!r.first_failure) r.first_failure = v;
        ++r.star_failures;
      }
    } else {
      ++r.other;
      if (lnk) ++r.other_link_acyclic;
    }
  }
  return r;
}

// ----------------------------------------------------------------- subdivision

namespace {

std::string face_label(std::uint32_t face) {
  if (std::popcount(face) == 1) return std::to_string(std::countr_zero(face));
  std::string out = "{";
  for (std::uint32_t f = face; f; f &= f - 1) {
    if (out.size() > 1) out += ",";
    out += std::to_string(std::countr_zero(f));
  }
  return out + "}";
}

Subdivision subdivide(int k, const std::function<bool(std::uint32_t)>& keep_whole) {
  if (k < 0 || k > 8) throw TopologyError("subdivision dimension out of range: " + std::to_string(k));
  Subdivision sub;
  sub.k = k;
  for (int v = 0; v <= k; ++v) {
    sub.complex.add_vertex(std::to_string(v));
    sub.carrier.push_back(1u << v);
  }
  const std::uint32_t full = (1u << (k + 1)) - 1;
  // Faces in order of size, so every boundary face is ready before its cone.
  std::vector<std::uint32_t> faces;
  for (std::uint32_t f = 1; f <= full; ++f) faces.push_back(f);
  std::stable_sort(faces.begin(), faces.end(),
                   [](std::uint32_t a, std::uint32_t b) { return std::popcount(a) < std::popcount(b); });
  for (std::uint32_t face : faces) {
    std::vector<Simplex> tops;
    if (std::popcount(face) == 1 || keep_whole(face)) {
      Simplex s;
      for (std::uint32_t f = face; f; f &= f - 1) s.push_back(std::countr_zero(f));
      tops.push_back(std::move(s));
    } else {
      const int apex = sub.complex.add_vertex(face_label(face));
      sub.carrier.push_back(face);
      for (std::uint32_t f = face; f; f &= f - 1) {
        for (Simplex s : sub.divisions.at(face & ~(f & -f))) {
          s.insert(std::upper_bound(s.begin(), s.end(), apex), apex);
          tops.push_back(std::move(s));
        }
      }
    }
    sub.divisions[face] = tops;
  }
  for (const auto& s : sub.divisions.at(full)) sub.complex.add_simplex(s);
  return sub;
}

}  // namespace

Subdivision subdivide_cone(int k) {
  const std::uint32_t top = 1u << k;
  const std::uint32_t zero_top = 1u | top;
  return subdivide(k, [=](std::uint32_t face) { return !(face & top) || face == zero_top; });
}

Subdivision subdivide_barycentric(int k) {
  return subdivide(k, [](std::uint32_t) { return false; });
}

SpernerResult sperner_check(const Subdivision& sub, const std::vector<int>& coloring) {
  if (coloring.size() != static_cast<std::size_t>(sub.complex.vertex_count()))
    throw TopologyError("coloring must cover every subdivision vertex");
  SpernerResult r;
  r.is_sperner = true;
  for (std::size_t v = 0; v < coloring.size(); ++v) {
    const int c = coloring[v];
    if (c < 0 || c > sub.k || !(sub.carrier[v] >> c & 1u)) r.is_sperner = false;
  }
  const std::uint32_t full = (1u << (sub.k + 1)) - 1;
  for (const auto& s : sub.divisions.at(full)) {
    std::uint32_t colors = 0;
    for (int v : s) {
      const int c = coloring[static_cast<std::size_t>(v)];
      if (c >= 0 && c <= sub.k) colors |= 1u << c;
    }
    if (colors == full) ++r.fully_colored;
  }
  return r;
}

std::vector<int> random_sperner_coloring(const Subdivision& sub, std::mt19937_64& rng) {
  std::vector<int> out;
  for (std::uint32_t carrier : sub.carrier) {
    std::uniform_int_distribution<int> pick(0, std::popcount(carrier) - 1);
    std::uint32_t c = carrier;
    for (int skip = pick(rng); skip > 0; --skip) c &= c - 1;
    out.push_back(std::countr_zero(c));
  }
  return out;
}

}  // namespace kset
