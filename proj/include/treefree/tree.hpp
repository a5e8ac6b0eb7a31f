#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "treefree/digraph.hpp"
#include "treefree/error.hpp"

namespace treefree {

// A vertex of the string tree: a finite sequence of letters in [1..N] with
// no equal adjacent letters.  letters[0] is the most recent letter; the path
// to the root repeatedly drops the front letter.  The empty string is the
// root.
using Str = std::vector<int>;

bool is_alternating(const Str& s);

// Collapses consecutive repeats: {1,1,2,3,3,1} -> {1,2,3,1}.  Letters must
// lie in [1..N]; pass N = 0 to skip the range check.
Str reduce_string(const Str& raw, int N = 0);

// Render as digits when every letter is <= 9, otherwise dot-separated.
std::string str_to_string(const Str& s);
Str str_from_string(const std::string& text);

struct StrHash {
    size_t operator()(const Str& s) const {
        size_t h = 146527;
        for (int x : s) h = h * 1000003u + static_cast<size_t>(x);
        return h;
    }
};

class TreeSpec;

struct FreeSpec { int N; };
struct BoolSpec { int N; };
struct MonoSpec { int N; };
struct AntiMonoSpec { int N; };
struct OrthSpec {};
struct SubSpec {};
struct WalkSpec { Digraph g; };
// Root has n children, every other vertex has d children; realized on the
// alphabet max(n, d+1) via the cyclic d-regular digraph with walks allowed
// to start only at [1..n].
struct RegularSpec { int n; int d; };
struct ExplicitSpec {
    int N;
    std::vector<Str> vertices; // sorted length-lex, includes the root
};
struct CompositeSpec {
    // parts[0] is the outer spec, parts[1..] are the inner specs (one per
    // outer letter).  Inner letters are shifted by consecutive offsets.
    std::vector<TreeSpec> parts;
};
struct PermutedSpec {
    std::vector<TreeSpec> base; // exactly one element
    std::vector<int> sigma;     // sigma[i-1] is the image of letter i
};

// A rooted subtree of the N-regular string tree, represented symbolically.
// Immutable; all queries are pure.  Infinite trees are never materialized:
// consumers call truncate() for the ball of a given radius.
class TreeSpec {
  public:
    using Variant = std::variant<FreeSpec, BoolSpec, MonoSpec, AntiMonoSpec, OrthSpec, SubSpec,
                                 WalkSpec, RegularSpec, ExplicitSpec, CompositeSpec, PermutedSpec>;

    TreeSpec() : v_(BoolSpec{1}) {}
    explicit TreeSpec(Variant v);

    static TreeSpec free_tree(int N) { return TreeSpec(Variant(FreeSpec{N})); }
    static TreeSpec bool_tree(int N) { return TreeSpec(Variant(BoolSpec{N})); }
    static TreeSpec mono_tree(int N) { return TreeSpec(Variant(MonoSpec{N})); }
    static TreeSpec anti_mono_tree(int N) { return TreeSpec(Variant(AntiMonoSpec{N})); }
    static TreeSpec orth_tree() { return TreeSpec(Variant(OrthSpec{})); }
    static TreeSpec sub_tree() { return TreeSpec(Variant(SubSpec{})); }
    static TreeSpec walk_tree(Digraph g) { return TreeSpec(Variant(WalkSpec{std::move(g)})); }
    static TreeSpec regular_tree(int n, int d) { return TreeSpec(Variant(RegularSpec{n, d})); }
    static TreeSpec explicit_tree(int N, std::vector<Str> vertices);
    // The operad identity: the one-letter tree {root, 1}.
    static TreeSpec identity() { return free_tree(1); }

    const Variant& variant() const { return v_; }

    int alphabet() const;

    // Membership of an arbitrary raw string (validated to be alternating and
    // in range; returns false rather than throwing for non-alternating input).
    bool contains(const Str& s) const;

    bool operator==(const TreeSpec& o) const;

  private:
    Variant v_;
};

// Operad composition T(T_1,...,T_k); inners.size() must equal outer alphabet.
TreeSpec compose(const TreeSpec& outer, const std::vector<TreeSpec>& inners);

// Right permutation action: vertex set mapped letterwise by sigma^{-1}.
// sigma is given as the function i -> sigma[i-1] on [1..N].
TreeSpec permute(const TreeSpec& spec, const std::vector<int>& sigma);

// The ball of a given radius: exactly the vertices of length <= depth, in
// canonical length-lexicographic order.
class FiniteTree {
  public:
    FiniteTree() { build_index(); }
    // Constructed by truncate(); vertices must be length-lex sorted, suffix
    // closed, alternating, starting with the root.
    FiniteTree(int N, int depth, std::vector<Str> vertices);

    int alphabet() const { return N_; }
    int depth() const { return depth_; }
    const std::vector<Str>& vertices() const { return verts_; }
    size_t size() const { return verts_.size(); }

    bool contains(const Str& s) const { return index_.count(s) > 0; }
    int vertex_id(const Str& s) const;

    // Letters j such that j . s is a vertex (the children of s, away from
    // the root).  Only meaningful for |s| < depth.
    const std::vector<int>& child_letters(int vertex_id) const { return children_[vertex_id]; }

    // Number of single-letter vertices ("n"): neighbors of the root.
    int root_degree() const { return root_degree_; }

    // Vertices of length exactly len (contiguous in the sorted order).
    std::pair<int, int> level_range(int len) const;

    // The ball of smaller radius d around the root.
    FiniteTree ball(int d) const;

    // Branch at letter j: { s : s.j in T } (append j at the far end, next to
    // the root).  Result has depth() - 1.
    FiniteTree branch(int j) const;

    // Canonical serialization, usable as a memo key.
    std::string key() const;

    bool operator==(const FiniteTree& o) const {
        return N_ == o.N_ && depth_ == o.depth_ && verts_ == o.verts_;
    }

  private:
    int N_ = 1;
    int depth_ = 0;
    std::vector<Str> verts_{Str{}};
    std::unordered_map<Str, int, StrHash> index_;
    std::vector<std::vector<int>> children_;
    int root_degree_ = 0;

    void build_index();
};

FiniteTree truncate(const TreeSpec& spec, int depth);

// Largest l <= max_depth with equal balls of radius l; returns max_depth
// when the balls agree all the way (the ">= max_depth" marker).
int ball_agreement_depth(const TreeSpec& a, const TreeSpec& b, int max_depth);

struct PushforwardResult {
    bool ok = false;
    std::optional<Str> witness; // source string whose image breaks the check
};

// Checks that letterwise application of psi: [N'] -> [N] restricts to a
// bijection from the depth-ball of src onto the vertices of dst (same depth)
// that use only letters in the range of psi.
PushforwardResult pushforward_check(const TreeSpec& src, const TreeSpec& dst,
                                    const std::vector<int>& psi, int depth);

// Walks on a digraph: the string j1..jl is a vertex iff consecutive letters
// satisfy j_{i+1} ~ j_i (the walk reads the string right to left).
TreeSpec walk_tree(const Digraph& g);

} // namespace treefree
