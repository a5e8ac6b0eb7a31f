#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "treefree/error.hpp"
#include "treefree/tree.hpp"

namespace treefree {

// A non-crossing partition of [1..l].  Blocks are numbered by first
// occurrence, so block_of() doubles as the canonical restricted-growth
// string.  The nesting structure (parent/children/depth per block, with an
// artificial root above the outer blocks) is computed on construction;
// everything is immutable afterwards.
class NCPartition {
  public:
    NCPartition() = default;
    // rgs[i] is the 0-based block id of element i+1; ids appear in first-
    // occurrence order.  Throws if the encoded partition has a crossing.
    explicit NCPartition(std::vector<int> rgs);

    static NCPartition from_blocks(int l, const std::vector<std::vector<int>>& blocks);

    int ground_size() const { return static_cast<int>(rgs_.size()); }
    int block_count() const { return static_cast<int>(blocks_.size()); }
    const std::vector<int>& rgs() const { return rgs_; }
    const std::vector<std::vector<int>>& blocks() const { return blocks_; } // 1-based elements
    int block_of(int element) const { return rgs_[element - 1]; }

    // Nesting tree: parent(b) is the block immediately surrounding b, or -1
    // for outer blocks (children of the artificial root).
    int parent(int b) const { return parent_[b]; }
    const std::vector<int>& children(int b) const { return children_[b]; }
    const std::vector<int>& outer_blocks() const { return outer_; }
    int depth_of(int b) const { return depth_[b]; }
    int max_depth() const { return max_depth_; }

    // Block b followed by all strictly surrounding blocks, innermost first.
    std::vector<int> chain(int b) const;

    bool is_interval() const { return max_depth_ <= 1; }
    bool is_irreducible() const {
        return !rgs_.empty() && rgs_.front() == rgs_.back();
    }
    int inner_block_count() const { return inner_count_; }

    // Induced partition on a sorted subset of [1..l], relabeled to [1..k].
    NCPartition restrict_to(const std::vector<int>& elements) const;

    std::string key() const; // canonical serialization of the rgs

    bool operator==(const NCPartition& o) const { return rgs_ == o.rgs_; }

  private:
    std::vector<int> rgs_;
    std::vector<std::vector<int>> blocks_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> children_;
    std::vector<int> outer_;
    std::vector<int> depth_;
    int max_depth_ = 0;
    int inner_count_ = 0;
};

// All non-crossing partitions of [1..l] in lexicographic rgs order.
// Guarded at l <= 14 (Catalan growth).
std::vector<NCPartition> enumerate_nc(int l);

// A coloring assigns a letter in [1..N] to each block.
using BlockColoring = std::vector<int>;

// The colored chain string of block b: color(b) color(parent) ... outward.
Str chain_string(const NCPartition& pi, const BlockColoring& chi, int b);

// chi-components: connected components of the nesting forest after cutting
// edges between differently colored blocks.  Returns one sorted block-id
// list per component.
std::vector<std::vector<int>> chi_components(const NCPartition& pi, const BlockColoring& chi);

// Every colored chain string is a vertex of T (strict compatibility).
bool compatible(const NCPartition& pi, const BlockColoring& chi, const FiniteTree& T);
// The alternating reduction of every chain string is a vertex of T.
bool weakly_compatible(const NCPartition& pi, const BlockColoring& chi, const FiniteTree& T);

struct Quotient {
    NCPartition tau;
    // For each block of tau, the sorted list of pi-blocks merged into it.
    std::vector<std::vector<int>> groups;
    // Was the full merge (every block joined through the nesting tree)?
    bool full_merge = false;
};

// All quotients of pi: contract each subset of nesting-tree edges between
// blocks (2^{#inner blocks} of them).  groups[k] lists the pi-blocks making
// up block k of tau.
std::vector<Quotient> quotients(const NCPartition& pi);

// Rooted level-preserving graph homomorphisms from the nesting tree of tau
// into T (root to root, a block at depth d to a vertex of length d).
std::uint64_t hom_count(const NCPartition& tau, const FiniteTree& T);

// Number of linear extensions of the nesting forest (outer blocks minimal).
// Computed by the forest hook-length formula; guarded at 10 blocks.
std::uint64_t linear_extensions(const NCPartition& pi);

} // namespace treefree
