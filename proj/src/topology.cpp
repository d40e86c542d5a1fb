#include "scatteropt/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "scatteropt/error.hpp"

namespace scatteropt {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    /// Attaches `child`'s set under `root` (both must be roots).
    void attach(int child, int root) { parent_[child] = root; }

private:
    std::vector<int> parent_;
};

// Live component data, stored at the union-find root.
struct Component {
    double birth = 0.0;
    std::size_t birth_rank = 0;  // position in the sweep; smaller = older
    int birth_cell = -1;
};

}  // namespace

MergeTree build_merge_tree(const DensityField& field) {
    const int w = field.width;
    const int h = field.height;
    const std::size_t n = field.values.size();

    // Sweep cells from the highest density down; equal densities by index.
    std::vector<int> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (field.values[i] > 0.0) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (field.values[a] != field.values[b]) return field.values[a] > field.values[b];
        return a < b;
    });

    DisjointSets sets(n);
    std::vector<bool> active(n, false);
    std::vector<Component> comp(n);

    struct Record {
        MergeNode node;
        std::size_t birth_rank;
    };
    std::vector<Record> records;

    std::vector<int> roots;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const int cell = order[rank];
        const double level = field.values[cell];
        const int cx = cell % w;
        const int cy = cell / w;

        roots.clear();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int x = cx + dx, y = cy + dy;
                if (x < 0 || x >= w || y < 0 || y >= h) continue;
                const int nb = y * w + x;
                if (!active[nb]) continue;
                const int r = sets.find(nb);
                if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
            }
        }
        active[cell] = true;

        if (roots.empty()) {
            comp[cell] = {level, rank, cell};
            continue;
        }
        // Elder rule: the oldest component survives, the others die here.
        const int eldest = *std::min_element(roots.begin(), roots.end(), [&](int a, int b) {
            return comp[a].birth_rank < comp[b].birth_rank;
        });
        for (int r : roots) {
            if (r == eldest) continue;
            const Component& dying = comp[r];
            records.push_back({{dying.birth, level, dying.birth - level, dying.birth_cell}, dying.birth_rank});
            sets.attach(r, eldest);
        }
        sets.attach(cell, eldest);
    }

    // Survivors are separated by zero-density cells; they all end at 0.
    std::optional<std::size_t> root_rank;
    for (int cell : order) {
        if (sets.find(cell) != cell) continue;
        const Component& c = comp[cell];
        records.push_back({{c.birth, 0.0, c.birth, c.birth_cell}, c.birth_rank});
        if (!root_rank || c.birth_rank < *root_rank) root_rank = c.birth_rank;
    }

    std::sort(records.begin(), records.end(),
              [](const Record& a, const Record& b) { return a.birth_rank < b.birth_rank; });
    MergeTree tree;
    for (const Record& r : records) {
        // A component that dies at its own birth density never appears in any
        // strict superlevel set.
        if (!(r.node.persistence > 0.0)) continue;
        if (root_rank && r.birth_rank == *root_rank) tree.root = tree.nodes.size();
        tree.nodes.push_back(r.node);
    }
    return tree;
}

ThresholdPlot threshold_plot(const MergeTree& tree) {
    ThresholdPlot plot;
    if (tree.nodes.empty()) return plot;
    std::vector<double> pers;
    pers.reserve(tree.nodes.size());
    for (const auto& node : tree.nodes) pers.push_back(node.persistence);
    std::sort(pers.begin(), pers.end());

    std::size_t remaining = pers.size();
    double prev = 0.0;
    for (std::size_t i = 0; i < pers.size();) {
        const double v = pers[i];
        std::size_t j = i;
        while (j < pers.size() && pers[j] == v) ++j;
        if (v > prev) plot.bars.push_back({remaining, prev, v, v - prev});
        remaining -= j - i;
        prev = v;
        i = j;
    }
    plot.domain_max = pers.back();
    return plot;
}

std::size_t ThresholdPlot::count_at(double tau) const {
    if (bars.empty() || tau > domain_max) return 0;
    if (tau <= 0.0) return bars.front().count;
    // count(tau) = #{persistence >= tau}: bars cover (t_min, t_max].
    for (const Bar& bar : bars)
        if (tau <= bar.t_max) return bar.count;
    return 0;
}

SaliencyScore saliency(const ThresholdPlot& plot, std::optional<ClusterRange> range) {
    SaliencyScore best;
    best.range = range;
    for (const Bar& bar : plot.bars) {
        if (range && !range->contains(bar.count)) continue;
        if (best.count == 0 || bar.saliency > best.value ||
            (bar.saliency == best.value && bar.count < best.count)) {
            best.value = bar.saliency;
            best.count = bar.count;
        }
    }
    return best;
}

double auc(const ThresholdPlot& plot) {
    double area = 0.0;
    for (const Bar& bar : plot.bars) area += static_cast<double>(bar.count) * (bar.t_max - bar.t_min);
    return area;
}

double total_persistence(const MergeTree& tree) {
    double sum = 0.0;
    for (const auto& node : tree.nodes) sum += node.persistence;
    return sum;
}

std::string_view to_string(Similarity s) {
    switch (s) {
        case Similarity::Similar: return "SR";
        case Similarity::SomewhatSimilar: return "SS";
        case Similarity::Dissimilar: return "DS";
    }
    return "?";
}

int AucBins::bin(double a) const {
    if (a < lower_edge) return 0;
    if (a < upper_edge) return 1;
    return 2;
}

Similarity AucBins::classify(double a, double b) const {
    switch (std::abs(bin(a) - bin(b))) {
        case 0: return Similarity::Similar;
        case 1: return Similarity::SomewhatSimilar;
        default: return Similarity::Dissimilar;
    }
}

AucBins auc_bins(std::span<const double> aucs, BinMode mode) {
    std::vector<double> sorted(aucs.begin(), aucs.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() < 2) throw InvalidArgument("AUC binning needs at least two distinct values");

    AucBins bins;
    if (mode == BinMode::EqualWidth) {
        const double lo = sorted.front();
        const double width = (sorted.back() - lo) / 3.0;
        bins.lower_edge = lo + width;
        bins.upper_edge = lo + 2.0 * width;
    } else {
        // Tertiles of the full (non-deduplicated) sample, linear interpolation.
        std::vector<double> all(aucs.begin(), aucs.end());
        std::sort(all.begin(), all.end());
        const auto quantile = [&](double q) {
            const double pos = q * static_cast<double>(all.size() - 1);
            const auto i = static_cast<std::size_t>(std::floor(pos));
            const double frac = pos - static_cast<double>(i);
            return i + 1 < all.size() ? all[i] + frac * (all[i + 1] - all[i]) : all[i];
        };
        bins.lower_edge = quantile(1.0 / 3.0);
        bins.upper_edge = quantile(2.0 / 3.0);
    }
    return bins;
}

std::string_view to_string(SaliencyLevel level) {
    switch (level) {
        case SaliencyLevel::Low: return "Low";
        case SaliencyLevel::Medium: return "Medium";
        case SaliencyLevel::High: return "High";
    }
    return "?";
}

SaliencyLevel SaliencyBins::classify(double score) const {
    if (score < lower_edge) return SaliencyLevel::Low;
    if (score < upper_edge) return SaliencyLevel::Medium;
    return SaliencyLevel::High;
}

SaliencyBins saliency_bins(std::span<const double> scores) {
    double max = 0.0;
    for (double s : scores) max = std::max(max, s);
    if (!(max > 0.0)) throw InvalidArgument("saliency binning needs a positive score");
    return {max / 3.0, 2.0 * max / 3.0, max};
}

}  // namespace scatteropt
