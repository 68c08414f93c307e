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

// Finite simplicial complexes over labeled vertices, mod-2 homology, the
// protocol complex of a set of runs, and Sperner colorings of subdivisions.

#ifndef KSET_TOPOLOGY_HPP_
#define KSET_TOPOLOGY_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kset/adversaries.hpp"
#include "kset/model.hpp"

namespace kset {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Simplex = std::vector<int>;  // sorted vertex ids

class SimplicialComplex {
 public:
  // Returns the id of the vertex with this label, creating it if needed.
  int add_vertex(const std::string& label);
  std::optional<int> find(const std::string& label) const;
  const std::string& label(int vertex) const { return labels_.at(static_cast<std::size_t>(vertex)); }
  int vertex_count() const { return static_cast<int>(labels_.size()); }

  // Inserts the simplex and every face of it.
  void add_simplex(Simplex s);
  void add_simplex_by_labels(const std::vector<std::string>& labels);
  bool contains(const Simplex& s) const { return simplexes_.count(s) > 0; }

  const std::set<Simplex>& simplexes() const { return simplexes_; }
  std::vector<Simplex> facets() const;
  int dimension() const;  // -1 when empty
  bool is_pure() const;
  bool is_closed() const;  // containment closure, checked from scratch
  std::vector<std::uint64_t> f_vector() const;
  std::int64_t euler_characteristic() const;
  std::vector<std::string> labels_of(const Simplex& s) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, int> index_;
  std::set<Simplex> simplexes_;
};

// The full simplex on the given labels, and its proper faces.
SimplicialComplex simplex_complex(const std::vector<std::string>& labels);
SimplicialComplex boundary(const std::vector<std::string>& labels);

SimplicialComplex star(const SimplicialComplex& complex, int vertex);
SimplicialComplex link(const SimplicialComplex& complex, int vertex);
// Requires disjoint label sets.
SimplicialComplex join(const SimplicialComplex& a, const SimplicialComplex& b);

// Reduced Betti numbers 0..max_dim over the two-element field. Dimensions
// above the complex's own report zero.
std::vector<int> betti_mod2(const SimplicialComplex& complex, int max_dim);
// Alternating face count minus one against the alternating reduced Betti sum.
bool euler_consistent(const SimplicialComplex& complex);

// ------------------------------------------------------------ protocol complex

struct ProtocolComplex {
  SimplicialComplex complex;
  int time = 0;
  std::uint64_t runs = 0;
  // Per vertex id.
  std::vector<ProcessId> process;
  std::vector<int> hc;         // hidden capacity of the view at `time`
  std::vector<int> min_hc;     // minimum hidden capacity over the owner's times 0..time
  std::vector<std::optional<Decision>> decision;  // decided by `time` under the protocol
};

// Vertices are deduplicated (process, view) pairs over processes active at
// `time`; each run contributes the simplex of its active processes.
ProtocolComplex protocol_complex(const std::vector<Adversary>& adversaries, int time, const std::string& protocol);
ProtocolComplex protocol_complex(const Enumerator& adversaries, int time, const std::string& protocol);

// Homology proxy over the vertices whose hidden capacity stays at least
// `threshold` at every time up to the complex's time.
struct HomologyProxyReport {
  std::uint64_t vertices = 0;
  std::uint64_t qualifying = 0;
  std::uint64_t star_failures = 0;
  std::optional<int> first_failure;
  // Link statistics, reported as data only.
  std::uint64_t qualifying_link_acyclic = 0;
  std::uint64_t other_link_acyclic = 0;
  std::uint64_t other = 0;

  bool ok() const { return star_failures == 0; }
};

HomologyProxyReport homology_proxy(const ProtocolComplex& pc, int threshold, int max_dim);

// ----------------------------------------------------------------- subdivision

struct Subdivision {
  int k = 0;                         // the base simplex has vertices 0..k
  SimplicialComplex complex;
  std::vector<std::uint32_t> carrier;  // per vertex id, a bitmask over 0..k
  // Top simplexes of the subdivision of every face, keyed by face bitmask.
  std::map<std::uint32_t, std::vector<Simplex>> divisions;
};

// Faces that avoid k, and the edge {0,k}, stay whole; every other face of
// dimension at least one is coned from a new vertex carried by that face.
Subdivision subdivide_cone(int k);
Subdivision subdivide_barycentric(int k);

struct SpernerResult {
  bool is_sperner = false;
  std::uint64_t fully_colored = 0;
};

SpernerResult sperner_check(const Subdivision& sub, const std::vector<int>& coloring);
std::vector<int> random_sperner_coloring(const Subdivision& sub, std::mt19937_64& rng);

}  // namespace kset

#endif  // KSET_TOPOLOGY_HPP_
