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

#ifndef KSET_COMM_GRAPH_HPP_
#define KSET_COMM_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "kset/model.hpp"

namespace kset {

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The communication graph of one adversary, realized for times 0..horizon.
// For every active node it stores the seen-set per level (the node set of
// its view), the senders it heard from in its own round, and the values it
// knows. Inactive nodes hold no data.
class CommGraph {
 public:
  CommGraph(Adversary adversary, int horizon);

  const Adversary& adversary() const { return adversary_; }
  const SystemParams& params() const { return adversary_.params; }
  int n() const { return n_; }
  int horizon() const { return horizon_; }

  bool active(NodeId node) const;
  // Processes other than node.process whose round-node.time message reached
  // the node. Zero at time 0.
  ProcessSet in_senders(NodeId node) const { return in_[index(node)]; }
  // Processes p such that <p,level> lies in the view of `observer`.
  ProcessSet seen(NodeId observer, int level) const {
    return seen_[index(observer) * static_cast<std::size_t>(horizon_ + 1) + static_cast<std::size_t>(level)];
  }
  ValueSet vals(NodeId node) const { return vals_[index(node)]; }

 private:
  std::size_t index(NodeId node) const {
    return static_cast<std::size_t>(node.time) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(node.process);
  }

  Adversary adversary_;
  int n_;
  int horizon_;
  std::vector<ProcessSet> in_;
  std::vector<ProcessSet> seen_;
  std::vector<ValueSet> vals_;
};

// A process's local state at a node: the labeled subgraph of the
// communication graph it has heard about. Views compare equal iff the
// underlying subgraphs (node sets, delivered edges, value labels) coincide,
// independently of the run they were taken from.
class View {
 public:
  View(std::shared_ptr<const CommGraph> graph, NodeId owner);

  NodeId owner() const { return owner_; }
  int time() const { return owner_.time; }
  int n() const { return graph_->n(); }
  const CommGraph& graph() const { return *graph_; }
  const SystemParams& params() const { return graph_->params(); }

  bool contains(NodeId node) const;
  ProcessSet seen_at(int level) const { return graph_->seen(owner_, level); }
  // Delivered edges into a seen node, as the set of senders.
  ProcessSet delivered_to(NodeId node) const;
  std::optional<Value> initial_value(ProcessId p) const;
  ValueSet values() const { return graph_->vals(owner_); }

  // Canonical serialization; equal views have equal keys.
  std::vector<std::uint32_t> key() const;
  std::size_t hash() const;

  friend bool operator==(const View& a, const View& b);

 private:
  std::shared_ptr<const CommGraph> graph_;
  NodeId owner_;
};

struct ViewHash {
  std::size_t operator()(const View& v) const { return v.hash(); }
};

class ViewTable {
 public:
  explicit ViewTable(std::shared_ptr<const CommGraph> graph) : graph_(std::move(graph)) {}

  const CommGraph& graph() const { return *graph_; }
  std::optional<View> at(NodeId node) const;
  std::size_t size() const;  // number of active nodes

 private:
  std::shared_ptr<const CommGraph> graph_;
};

ViewTable build_views(const Adversary& adversary, int horizon);

}  // namespace kset

#endif  // KSET_COMM_GRAPH_HPP_
