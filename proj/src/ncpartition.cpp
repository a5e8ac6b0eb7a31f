#include "treefree/ncpartition.hpp"

#include <algorithm>
#include <mutex>
#include <numeric>
#include <sstream>

namespace treefree {

NCPartition::NCPartition(std::vector<int> rgs) : rgs_(std::move(rgs)) {
    const int l = static_cast<int>(rgs_.size());
    int nblocks = 0;
    for (int i = 0; i < l; ++i) {
        if (rgs_[i] < 0 || rgs_[i] > nblocks)
            throw validation_error("partition encoding is not a restricted-growth string");
        if (rgs_[i] == nblocks) ++nblocks;
    }
    blocks_.assign(nblocks, {});
    for (int i = 0; i < l; ++i) blocks_[rgs_[i]].push_back(i + 1);

    // Nesting structure by a left-to-right scan with a stack of open blocks.
    // Non-crossing iff every revisited block is on top of the stack.
    parent_.assign(nblocks, -1);
    depth_.assign(nblocks, 0);
    children_.assign(nblocks, {});
    std::vector<int> stack;
    std::vector<int> seen_count(nblocks, 0);
    for (int i = 0; i < l; ++i) {
        const int b = rgs_[i];
        if (seen_count[b] == 0) {
            parent_[b] = stack.empty() ? -1 : stack.back();
            stack.push_back(b);
        } else if (stack.empty() || stack.back() != b) {
            throw validation_error("partition has a crossing");
        }
        ++seen_count[b];
        if (seen_count[b] == static_cast<int>(blocks_[b].size())) stack.pop_back();
    }
    for (int b = 0; b < nblocks; ++b) {
        if (parent_[b] < 0) {
            outer_.push_back(b);
            depth_[b] = 1;
        } else {
            children_[parent_[b]].push_back(b);
            depth_[b] = depth_[parent_[b]] + 1; // parents precede children in id order
        }
        max_depth_ = std::max(max_depth_, depth_[b]);
        if (depth_[b] > 1) ++inner_count_;
    }
}

NCPartition NCPartition::from_blocks(int l, const std::vector<std::vector<int>>& blocks) {
    std::vector<int> owner(l + 1, -1);
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].empty()) throw validation_error("partition has an empty block");
        for (int e : blocks[b]) {
            if (e < 1 || e > l || owner[e] >= 0)
                throw validation_error("blocks do not partition the ground set");
            owner[e] = static_cast<int>(b);
        }
    }
    std::vector<int> relabel(blocks.size(), -1);
    std::vector<int> rgs(l);
    int next = 0;
    for (int e = 1; e <= l; ++e) {
        if (owner[e] < 0) throw validation_error("blocks do not cover the ground set");
        if (relabel[owner[e]] < 0) relabel[owner[e]] = next++;
        rgs[e - 1] = relabel[owner[e]];
    }
    return NCPartition(std::move(rgs));
}

std::vector<int> NCPartition::chain(int b) const {
    if (b < 0 || b >= block_count()) throw validation_error("unknown block id");
    std::vector<int> out;
    for (int cur = b; cur >= 0; cur = parent_[cur]) out.push_back(cur);
    return out;
}

NCPartition NCPartition::restrict_to(const std::vector<int>& elements) const {
    std::vector<int> relabel(block_count(), -1);
    std::vector<int> rgs;
    rgs.reserve(elements.size());
    int next = 0;
    for (int e : elements) {
        const int b = block_of(e);
        if (relabel[b] < 0) relabel[b] = next++;
        rgs.push_back(relabel[b]);
    }
    return NCPartition(std::move(rgs));
}

std::string NCPartition::key() const {
    std::ostringstream os;
    for (size_t i = 0; i < rgs_.size(); ++i) {
        if (i) os << ',';
        os << rgs_[i];
    }
    return os.str();
}

namespace {

// Non-crossing partitions of an interval of length m, as rgs vectors, memoized.
class NCGenerator {
  public:
    const std::vector<std::vector<int>>& of_length(int m) {
        while (static_cast<int>(memo_.size()) <= m) build(static_cast<int>(memo_.size()));
        return memo_[m];
    }

  private:
    std::vector<std::vector<std::vector<int>>> memo_;

    void build(int m) {
        std::vector<std::vector<int>> out;
        if (m == 0) {
            out.push_back({});
            memo_.push_back(std::move(out));
            return;
        }
        // Choose the block containing element 1 as a subset {1} u S of
        // [2..m]; the gaps between chosen elements are partitioned
        // independently (any joint would cross the chosen block).
        std::vector<int> members;
        std::vector<int> rgs(m, -1);
        rec_choose(m, 1, members, out);
        std::sort(out.begin(), out.end());
        memo_.push_back(std::move(out));
    }

    void rec_choose(int m, int from, std::vector<int>& members,
                    std::vector<std::vector<int>>& out) {
        // members holds the elements > 1 chosen so far for block of 1.
        emit(m, members, out);
        for (int e = from + 1; e <= m; ++e) {
            members.push_back(e);
            rec_choose(m, e, members, out);
            members.pop_back();
        }
    }

    void emit(int m, const std::vector<int>& members, std::vector<std::vector<int>>& out) {
        std::vector<int> block{1};
        block.insert(block.end(), members.begin(), members.end());
        std::vector<std::pair<int, int>> gaps; // half-open [a, b)
        for (size_t i = 0; i + 1 < block.size(); ++i) gaps.emplace_back(block[i] + 1, block[i + 1]);
        gaps.emplace_back(block.back() + 1, m + 1);
        std::vector<int> base(m, -1);
        for (int e : block) base[e - 1] = 0;
        fill_gaps(base, gaps, 0, out);
    }

    void fill_gaps(std::vector<int>& partial, const std::vector<std::pair<int, int>>& gaps,
                   size_t gi, std::vector<std::vector<int>>& out) {
        if (gi == gaps.size()) {
            // Relabel to first-occurrence order.
            std::vector<int> relabel(partial.size() + 2, -1);
            std::vector<int> rgs(partial.size());
            int next = 0;
            for (size_t i = 0; i < partial.size(); ++i) {
                if (relabel[partial[i]] < 0) relabel[partial[i]] = next++;
                rgs[i] = relabel[partial[i]];
            }
            out.push_back(std::move(rgs));
            return;
        }
        auto [a, b] = gaps[gi];
        const int len = b - a;
        if (len == 0) {
            fill_gaps(partial, gaps, gi + 1, out);
            return;
        }
        // Distinct temporary ids: offset by position so gaps never collide.
        for (const auto& sub : of_length(len)) {
            for (int i = 0; i < len; ++i) partial[a - 1 + i] = 1 + a + sub[i];
            fill_gaps(partial, gaps, gi + 1, out);
        }
        for (int i = 0; i < len; ++i) partial[a - 1 + i] = -1;
    }
};

} // namespace

std::vector<NCPartition> enumerate_nc(int l) {
    if (l < 0 || l > 14) throw size_limit_error("non-crossing enumeration limited to 0 <= l <= 14");
    static NCGenerator gen;
    static std::mutex mtx;
    std::vector<std::vector<int>> raw;
    {
        std::lock_guard<std::mutex> lock(mtx);
        raw = gen.of_length(l);
    }
    std::vector<NCPartition> out;
    out.reserve(raw.size());
    for (auto& r : raw) out.emplace_back(std::move(r));
    return out;
}

Str chain_string(const NCPartition& pi, const BlockColoring& chi, int b) {
    Str s;
    for (int v : pi.chain(b)) s.push_back(chi[v]);
    return s;
}

std::vector<std::vector<int>> chi_components(const NCPartition& pi, const BlockColoring& chi) {
    const int nb = pi.block_count();
    std::vector<int> comp(nb, -1);
    int ncomp = 0;
    for (int b = 0; b < nb; ++b) {
        // Parents have smaller ids, so they are labeled before children.
        const int p = pi.parent(b);
        if (p >= 0 && chi[p] == chi[b])
            comp[b] = comp[p];
        else
            comp[b] = ncomp++;
    }
    std::vector<std::vector<int>> out(ncomp);
    for (int b = 0; b < nb; ++b) out[comp[b]].push_back(b);
    return out;
}

bool compatible(const NCPartition& pi, const BlockColoring& chi, const FiniteTree& T) {
    if (pi.max_depth() > T.depth())
        throw depth_error("truncation too shallow for the partition's nesting depth");
    for (int b = 0; b < pi.block_count(); ++b)
        if (!T.contains(chain_string(pi, chi, b))) return false;
    return true;
}

bool weakly_compatible(const NCPartition& pi, const BlockColoring& chi, const FiniteTree& T) {
    if (pi.max_depth() > T.depth())
        throw depth_error("truncation too shallow for the partition's nesting depth");
    for (int b = 0; b < pi.block_count(); ++b)
        if (!T.contains(reduce_string(chain_string(pi, chi, b)))) return false;
    return true;
}

std::vector<Quotient> quotients(const NCPartition& pi) {
    std::vector<int> inner;
    for (int b = 0; b < pi.block_count(); ++b)
        if (pi.parent(b) >= 0) inner.push_back(b);
    const int ni = static_cast<int>(inner.size());
    if (ni > 30) throw size_limit_error("too many inner blocks for quotient enumeration");

    const int l = pi.ground_size();
    std::vector<Quotient> out;
    out.reserve(size_t(1) << ni);
    for (std::uint32_t mask = 0; mask < (1u << ni); ++mask) {
        // Union-find by direct parent chasing: ids are topologically ordered.
        std::vector<int> rep(pi.block_count());
        std::iota(rep.begin(), rep.end(), 0);
        for (int i = 0; i < ni; ++i)
            if (mask & (1u << i)) rep[inner[i]] = rep[pi.parent(inner[i])];
        std::vector<int> rgs(l);
        for (int e = 1; e <= l; ++e) rgs[e - 1] = rep[pi.block_of(e)];
        // Relabel to restricted-growth form.
        std::vector<int> relabel(pi.block_count(), -1);
        int next = 0;
        for (int& x : rgs) {
            if (relabel[x] < 0) relabel[x] = next++;
            x = relabel[x];
        }
        Quotient q;
        q.tau = NCPartition(std::move(rgs));
        q.groups.assign(q.tau.block_count(), {});
        for (int b = 0; b < pi.block_count(); ++b) q.groups[relabel[rep[b]]].push_back(b);
        q.full_merge = (q.tau.block_count() == 1 && pi.block_count() > 1);
        out.push_back(std::move(q));
    }
    return out;
}

namespace {

std::uint64_t hom_count_rec(const NCPartition& tau, const FiniteTree& T, int block, int vertex_id) {
    std::uint64_t prod = 1;
    for (int child : tau.children(block)) {
        std::uint64_t sum = 0;
        const Str& s = T.vertices()[vertex_id];
        for (int j : T.child_letters(vertex_id)) {
            Str js;
            js.reserve(s.size() + 1);
            js.push_back(j);
            js.insert(js.end(), s.begin(), s.end());
            sum += hom_count_rec(tau, T, child, T.vertex_id(js));
        }
        prod *= sum;
        if (prod == 0) return 0;
    }
    return prod;
}

} // namespace

std::uint64_t hom_count(const NCPartition& tau, const FiniteTree& T) {
    if (tau.max_depth() > T.depth())
        throw depth_error("truncation too shallow for homomorphism counting");
    const int root = T.vertex_id(Str{});
    std::uint64_t prod = 1;
    for (int b : tau.outer_blocks()) {
        std::uint64_t sum = 0;
        for (int j : T.child_letters(root)) sum += hom_count_rec(tau, T, b, T.vertex_id(Str{j}));
        prod *= sum;
        if (prod == 0) return 0;
    }
    return prod;
}

std::uint64_t linear_extensions(const NCPartition& pi) {
    const int nb = pi.block_count();
    if (nb > 10) throw size_limit_error("linear extension count limited to 10 blocks");
    // Forest hook-length formula: |pi|! / prod of subtree sizes.
    std::vector<std::uint64_t> sub(nb, 1);
    for (int b = nb - 1; b >= 0; --b)
        for (int c : pi.children(b)) sub[b] += sub[c];
    std::uint64_t num = 1;
    for (int i = 2; i <= nb; ++i) num *= static_cast<std::uint64_t>(i);
    std::uint64_t den = 1;
    for (int b = 0; b < nb; ++b) den *= sub[b];
    return num / den;
}

} // namespace treefree
