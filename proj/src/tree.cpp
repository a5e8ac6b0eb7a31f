#include "treefree/tree.hpp"

#include <algorithm>
#include <sstream>

namespace treefree {

bool is_alternating(const Str& s) {
    for (size_t i = 0; i + 1 < s.size(); ++i)
        if (s[i] == s[i + 1]) return false;
    return true;
}

Str reduce_string(const Str& raw, int N) {
    Str out;
    for (int letter : raw) {
        if (letter < 1 || (N > 0 && letter > N))
            throw validation_error("letter out of range in string");
        if (out.empty() || out.back() != letter) out.push_back(letter);
    }
    return out;
}

std::string str_to_string(const Str& s) {
    bool digits = std::all_of(s.begin(), s.end(), [](int x) { return x >= 1 && x <= 9; });
    std::ostringstream os;
    for (size_t i = 0; i < s.size(); ++i) {
        if (!digits && i) os << '.';
        os << s[i];
    }
    return os.str();
}

Str str_from_string(const std::string& text) {
    Str out;
    if (text.empty()) return out;
    if (text.find('.') != std::string::npos || text.find(',') != std::string::npos) {
        std::string tok;
        std::istringstream is(text);
        while (std::getline(is, tok, text.find('.') != std::string::npos ? '.' : ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stoi(tok));
        }
    } else {
        for (char c : text) {
            if (c < '1' || c > '9') throw validation_error("bad letter in string literal: " + text);
            out.push_back(c - '0');
        }
    }
    return out;
}

// True when a precedes b in length-lexicographic order.
static bool length_lex_less(const Str& a, const Str& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

// ---------------------------------------------------------------------------
// TreeSpec

TreeSpec::TreeSpec(Variant v) : v_(std::move(v)) {
    if (auto* f = std::get_if<FreeSpec>(&v_)) {
        if (f->N < 1) throw validation_error("alphabet size must be positive");
    } else if (auto* b = std::get_if<BoolSpec>(&v_)) {
        if (b->N < 1) throw validation_error("alphabet size must be positive");
    } else if (auto* m = std::get_if<MonoSpec>(&v_)) {
        if (m->N < 1) throw validation_error("alphabet size must be positive");
    } else if (auto* a = std::get_if<AntiMonoSpec>(&v_)) {
        if (a->N < 1) throw validation_error("alphabet size must be positive");
    } else if (auto* r = std::get_if<RegularSpec>(&v_)) {
        if (r->n < 1 || r->d < 0) throw validation_error("regular tree needs n >= 1, d >= 0");
    } else if (auto* p = std::get_if<PermutedSpec>(&v_)) {
        if (p->base.size() != 1) throw validation_error("permuted spec needs exactly one base");
        const int N = p->base[0].alphabet();
        if (static_cast<int>(p->sigma.size()) != N)
            throw validation_error("invalid-permutation: wrong length");
        std::vector<bool> seen(N, false);
        for (int x : p->sigma) {
            if (x < 1 || x > N || seen[x - 1])
                throw validation_error("invalid-permutation: not a bijection on [1..N]");
            seen[x - 1] = true;
        }
    } else if (auto* c = std::get_if<CompositeSpec>(&v_)) {
        if (c->parts.empty()) throw validation_error("composite spec needs an outer part");
        if (static_cast<int>(c->parts.size()) - 1 != c->parts[0].alphabet())
            throw validation_error("composite: inner count must equal outer alphabet size");
    }
}

TreeSpec TreeSpec::explicit_tree(int N, std::vector<Str> vertices) {
    if (N < 1) throw validation_error("alphabet size must be positive");
    // Eager validation: alternation, letter range, suffix closure.
    std::sort(vertices.begin(), vertices.end(), length_lex_less);
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    if (vertices.empty() || !vertices[0].empty()) vertices.insert(vertices.begin(), Str{});
    std::unordered_map<Str, int, StrHash> seen;
    for (auto& s : vertices) {
        for (int letter : s)
            if (letter < 1 || letter > N)
                throw validation_error("invalid-tree: letter out of range");
        if (!is_alternating(s)) throw validation_error("invalid-tree: vertex not alternating");
        if (!s.empty()) {
            Str parent(s.begin() + 1, s.end());
            if (!seen.count(parent))
                throw validation_error("invalid-tree: not closed under deleting the first letter");
        }
        seen.emplace(s, 1);
    }
    return TreeSpec(Variant(ExplicitSpec{N, std::move(vertices)}));
}

int TreeSpec::alphabet() const {
    struct V {
        int operator()(const FreeSpec& s) const { return s.N; }
        int operator()(const BoolSpec& s) const { return s.N; }
        int operator()(const MonoSpec& s) const { return s.N; }
        int operator()(const AntiMonoSpec& s) const { return s.N; }
        int operator()(const OrthSpec&) const { return 2; }
        int operator()(const SubSpec&) const { return 2; }
        int operator()(const WalkSpec& s) const { return s.g.vertex_count(); }
        int operator()(const RegularSpec& s) const { return std::max(s.n, s.d + 1); }
        int operator()(const ExplicitSpec& s) const { return s.N; }
        int operator()(const CompositeSpec& s) const {
            int total = 0;
            for (size_t i = 1; i < s.parts.size(); ++i) total += s.parts[i].alphabet();
            return total;
        }
        int operator()(const PermutedSpec& s) const { return s.base[0].alphabet(); }
    };
    return std::visit(V{}, v_);
}

namespace {

bool composite_contains(const CompositeSpec& c, const Str& s) {
    // Letters of inner j occupy the offset range (off[j-1], off[j]].
    const size_t k = c.parts.size() - 1;
    std::vector<int> off(k + 1, 0);
    for (size_t j = 1; j <= k; ++j) off[j] = off[j - 1] + c.parts[j].alphabet();
    auto owner = [&](int letter) -> int {
        for (size_t j = 1; j <= k; ++j)
            if (letter > off[j - 1] && letter <= off[j]) return static_cast<int>(j);
        return 0;
    };
    // Decompose into maximal runs of constant owner; the run strings (shifted
    // back to the inner alphabet) must be nonempty vertices of the inner
    // trees and the run owners must form a vertex of the outer tree.
    Str outer_str;
    size_t i = 0;
    while (i < s.size()) {
        const int j = owner(s[i]);
        if (j == 0) return false;
        Str run;
        while (i < s.size() && owner(s[i]) == j) {
            run.push_back(s[i] - off[j - 1]);
            ++i;
        }
        if (!c.parts[j].contains(run)) return false;
        outer_str.push_back(j);
    }
    return c.parts[0].contains(outer_str);
}

} // namespace

bool TreeSpec::contains(const Str& s) const {
    if (s.empty()) return true;
    const int N = alphabet();
    for (int letter : s)
        if (letter < 1 || letter > N) return false;
    if (!is_alternating(s)) return false;

    struct V {
        const Str& s;
        bool operator()(const FreeSpec&) const { return true; }
        bool operator()(const BoolSpec&) const { return s.size() <= 1; }
        bool operator()(const MonoSpec&) const {
            for (size_t i = 0; i + 1 < s.size(); ++i)
                if (!(s[i] > s[i + 1])) return false;
            return true;
        }
        bool operator()(const AntiMonoSpec&) const {
            for (size_t i = 0; i + 1 < s.size(); ++i)
                if (!(s[i] < s[i + 1])) return false;
            return true;
        }
        bool operator()(const OrthSpec&) const {
            return s == Str{1} || s == Str{2, 1};
        }
        bool operator()(const SubSpec&) const { return s.back() == 1; }
        bool operator()(const WalkSpec& w) const {
            for (size_t i = 0; i + 1 < s.size(); ++i)
                if (!w.g.adjacent(s[i + 1], s[i])) return false;
            return true;
        }
        bool operator()(const RegularSpec& r) const {
            const int verts = std::max(r.n, r.d + 1);
            if (s.back() > r.n) return false;
            for (size_t i = 0; i + 1 < s.size(); ++i) {
                // s[i] must be one of the d cyclic successors of s[i+1].
                int delta = (s[i] - s[i + 1] + verts) % verts;
                if (delta < 1 || delta > r.d) return false;
            }
            return true;
        }
        bool operator()(const ExplicitSpec& e) const {
            return std::binary_search(e.vertices.begin(), e.vertices.end(), s, length_lex_less);
        }
        bool operator()(const CompositeSpec& c) const { return composite_contains(c, s); }
        bool operator()(const PermutedSpec& p) const {
            Str t(s);
            for (int& letter : t) letter = p.sigma[letter - 1];
            return p.base[0].contains(t);
        }
    };
    return std::visit(V{s}, v_);
}

bool TreeSpec::operator==(const TreeSpec& o) const {
    if (v_.index() != o.v_.index()) return false;
    struct V {
        const Variant& other;
        bool operator()(const FreeSpec& s) const { return s.N == std::get<FreeSpec>(other).N; }
        bool operator()(const BoolSpec& s) const { return s.N == std::get<BoolSpec>(other).N; }
        bool operator()(const MonoSpec& s) const { return s.N == std::get<MonoSpec>(other).N; }
        bool operator()(const AntiMonoSpec& s) const {
            return s.N == std::get<AntiMonoSpec>(other).N;
        }
        bool operator()(const OrthSpec&) const { return true; }
        bool operator()(const SubSpec&) const { return true; }
        bool operator()(const WalkSpec& s) const { return s.g == std::get<WalkSpec>(other).g; }
        bool operator()(const RegularSpec& s) const {
            auto& o2 = std::get<RegularSpec>(other);
            return s.n == o2.n && s.d == o2.d;
        }
        bool operator()(const ExplicitSpec& s) const {
            auto& o2 = std::get<ExplicitSpec>(other);
            return s.N == o2.N && s.vertices == o2.vertices;
        }
        bool operator()(const CompositeSpec& s) const {
            return s.parts == std::get<CompositeSpec>(other).parts;
        }
        bool operator()(const PermutedSpec& s) const {
            auto& o2 = std::get<PermutedSpec>(other);
            return s.base == o2.base && s.sigma == o2.sigma;
        }
    };
    return std::visit(V{o.v_}, v_);
}

TreeSpec compose(const TreeSpec& outer, const std::vector<TreeSpec>& inners) {
    if (static_cast<int>(inners.size()) != outer.alphabet())
        throw validation_error("compose: need one inner tree per outer letter");
    CompositeSpec c;
    c.parts.reserve(inners.size() + 1);
    c.parts.push_back(outer);
    for (auto& t : inners) c.parts.push_back(t);
    return TreeSpec(TreeSpec::Variant(std::move(c)));
}

TreeSpec permute(const TreeSpec& spec, const std::vector<int>& sigma) {
    // Composing permutation layers directly keeps the right-action identity
    // (T_sigma)_tau = T_{sigma . tau} exact at the spec level.
    if (auto* p = std::get_if<PermutedSpec>(&spec.variant())) {
        std::vector<int> combined(sigma.size());
        for (size_t i = 0; i < sigma.size(); ++i) combined[i] = p->sigma[sigma[i] - 1];
        return TreeSpec(TreeSpec::Variant(PermutedSpec{{p->base[0]}, std::move(combined)}));
    }
    return TreeSpec(TreeSpec::Variant(PermutedSpec{{spec}, sigma}));
}

// ---------------------------------------------------------------------------
// FiniteTree

FiniteTree::FiniteTree(int N, int depth, std::vector<Str> vertices)
    : N_(N), depth_(depth), verts_(std::move(vertices)) {
    build_index();
}

void FiniteTree::build_index() {
    index_.clear();
    index_.reserve(verts_.size() * 2);
    for (size_t i = 0; i < verts_.size(); ++i) index_.emplace(verts_[i], static_cast<int>(i));
    children_.assign(verts_.size(), {});
    root_degree_ = 0;
    for (auto& s : verts_) {
        if (s.size() == 1) ++root_degree_;
        if (s.empty()) continue;
        Str parent(s.begin() + 1, s.end());
        auto it = index_.find(parent);
        if (it == index_.end())
            throw validation_error("invalid-tree: ball is not suffix closed");
        children_[it->second].push_back(s[0]);
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());
}

int FiniteTree::vertex_id(const Str& s) const {
    auto it = index_.find(s);
    return it == index_.end() ? -1 : it->second;
}

std::pair<int, int> FiniteTree::level_range(int len) const {
    auto lo = std::partition_point(verts_.begin(), verts_.end(),
                                   [&](const Str& s) { return static_cast<int>(s.size()) < len; });
    auto hi = std::partition_point(lo, verts_.end(),
                                   [&](const Str& s) { return static_cast<int>(s.size()) <= len; });
    return {static_cast<int>(lo - verts_.begin()), static_cast<int>(hi - verts_.begin())};
}

FiniteTree FiniteTree::ball(int d) const {
    if (d >= depth_) return *this;
    auto [lo, hi] = level_range(d);
    (void)lo;
    std::vector<Str> keep(verts_.begin(), verts_.begin() + hi);
    return FiniteTree(N_, d, std::move(keep));
}

FiniteTree FiniteTree::branch(int j) const {
    // { s : s.j is a vertex }: drop the last letter of every vertex ending
    // with j.  These strings are generally not vertices themselves.  Empty
    // when the singleton j is absent.
    std::vector<Str> keep;
    for (auto& v : verts_) {
        if (v.empty() || v.back() != j) continue;
        keep.emplace_back(v.begin(), v.end() - 1);
    }
    std::sort(keep.begin(), keep.end(), length_lex_less);
    return FiniteTree(N_, std::max(0, depth_ - 1), std::move(keep));
}

std::string FiniteTree::key() const {
    std::ostringstream os;
    os << N_ << '|' << depth_;
    for (auto& s : verts_) {
        os << '|';
        for (size_t i = 0; i < s.size(); ++i) {
            if (i) os << '.';
            os << s[i];
        }
    }
    return os.str();
}

FiniteTree truncate(const TreeSpec& spec, int depth) {
    if (depth < 0) throw validation_error("truncation depth must be >= 0");
    const int N = spec.alphabet();
    std::vector<Str> verts{Str{}};
    std::vector<Str> frontier{Str{}};
    for (int level = 1; level <= depth; ++level) {
        std::vector<Str> next;
        for (auto& s : frontier) {
            for (int j = 1; j <= N; ++j) {
                if (!s.empty() && s[0] == j) continue;
                Str js;
                js.reserve(s.size() + 1);
                js.push_back(j);
                js.insert(js.end(), s.begin(), s.end());
                if (spec.contains(js)) next.push_back(std::move(js));
            }
        }
        std::sort(next.begin(), next.end());
        verts.insert(verts.end(), next.begin(), next.end());
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return FiniteTree(N, depth, std::move(verts));
}

int ball_agreement_depth(const TreeSpec& a, const TreeSpec& b, int max_depth) {
    if (a.alphabet() != b.alphabet())
        throw validation_error("incompatible-alphabet: trees live on different letter sets");
    FiniteTree ba = truncate(a, max_depth), bb = truncate(b, max_depth);
    for (int l = 1; l <= max_depth; ++l) {
        auto ra = ba.level_range(l), rb = bb.level_range(l);
        if (ra.second - ra.first != rb.second - rb.first) return l - 1;
        for (int i = ra.first, k = rb.first; i < ra.second; ++i, ++k)
            if (ba.vertices()[i] != bb.vertices()[k]) return l - 1;
    }
    return max_depth;
}

PushforwardResult pushforward_check(const TreeSpec& src, const TreeSpec& dst,
                                    const std::vector<int>& psi, int depth) {
    const int Nsrc = src.alphabet();
    const int Ndst = dst.alphabet();
    if (static_cast<int>(psi.size()) != Nsrc)
        throw validation_error("pushforward: psi must be total on the source alphabet");
    for (int x : psi)
        if (x < 1 || x > Ndst) throw validation_error("pushforward: psi image out of range");

    std::vector<bool> in_range(Ndst + 1, false);
    for (int x : psi) in_range[x] = true;

    FiniteTree bsrc = truncate(src, depth);
    FiniteTree bdst = truncate(dst, depth);

    std::unordered_map<Str, int, StrHash> image;
    for (auto& s : bsrc.vertices()) {
        Str t(s);
        for (int& letter : t) letter = psi[letter - 1];
        if (!is_alternating(t)) return {false, s};
        if (!bdst.contains(t)) return {false, s};
        if (!image.emplace(t, 1).second) return {false, s}; // not injective
    }
    for (auto& t : bdst.vertices()) {
        bool on_range = std::all_of(t.begin(), t.end(), [&](int x) { return in_range[x]; });
        if (on_range && !image.count(t)) return {false, t}; // not onto
    }
    return {true, std::nullopt};
}

TreeSpec walk_tree(const Digraph& g) { return TreeSpec::walk_tree(g); }

} // namespace treefree
