#include "mdi/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "mdi/error.hpp"
#include "mdi/hexfloat.hpp"

namespace mdi {

double gini(const std::vector<std::size_t>& counts) {
    std::size_t n = 0;
    double sq = 0;
    for (auto c : counts) {
        n += c;
        sq += static_cast<double>(c) * static_cast<double>(c);
    }
    if (n == 0) return 0.0;
    return 1.0 - sq / (static_cast<double>(n) * static_cast<double>(n));
}

const char* to_string(FeatureRule rule) {
    switch (rule) {
        case FeatureRule::sqrt: return "sqrt";
        case FeatureRule::log2: return "log2";
        case FeatureRule::all: return "all";
    }
    return "unknown";
}

FeatureRule parse_feature_rule(const std::string& s) {
    if (s == "sqrt") return FeatureRule::sqrt;
    if (s == "log2") return FeatureRule::log2;
    if (s == "all") return FeatureRule::all;
    throw InvalidArgument("unknown feature rule: " + s);
}

std::size_t features_per_split(FeatureRule rule, std::size_t width) {
    switch (rule) {
        case FeatureRule::sqrt: return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(width))));
        case FeatureRule::log2: return std::max<std::size_t>(1, static_cast<std::size_t>(std::log2(static_cast<double>(width))));
        case FeatureRule::all: return width;
    }
    return width;
}

BinnedMatrix::BinnedMatrix(const Matrix& x) : rows_(static_cast<std::size_t>(x.rows())) {
    const auto cols = static_cast<std::size_t>(x.cols());
    values_.resize(cols);
    bins_.resize(rows_ * cols);
    std::vector<double> sorted(rows_);
    for (std::size_t c = 0; c < cols; ++c) {
        const double* col = x.data() + c * rows_;
        sorted.assign(col, col + rows_);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        values_[c] = sorted;
        auto& vals = values_[c];
        for (std::size_t r = 0; r < rows_; ++r)
            bins_[c * rows_ + r] =
                static_cast<std::uint32_t>(std::lower_bound(vals.begin(), vals.end(), col[r]) - vals.begin());
    }
}

namespace {

int majority(const std::vector<std::size_t>& counts) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class Grower {
public:
    Grower(const BinnedMatrix& bins, const std::vector<int>& labels, std::size_t n_classes, const TreeParams& params,
           std::size_t features_per_node, Rng* rng)
        : bins_(bins), labels_(labels), c_(n_classes), params_(params), fpn_(features_per_node), rng_(rng),
          order_(bins.cols()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
    }

    std::vector<TreeNode> grow(std::vector<std::size_t> samples) {
        samples_ = std::move(samples);
        build(0, samples_.size(), 0);
        return std::move(nodes_);
    }

private:
    struct Best {
        double score = -std::numeric_limits<double>::infinity();
        int feature = -1;
        std::uint32_t left_bin = 0;
        std::uint32_t right_bin = 0;
    };

    int build(std::size_t lo, std::size_t hi, int depth) {
        const std::size_t m = hi - lo;
        std::vector<std::size_t> counts(c_, 0);
        for (std::size_t s = lo; s < hi; ++s) ++counts[static_cast<std::size_t>(labels_[samples_[s]])];
        TreeNode node;
        node.prediction = majority(counts);
        node.samples = m;
        node.impurity = gini(counts);
        const int idx = static_cast<int>(nodes_.size());
        nodes_.push_back(node);

        const bool depth_ok = !params_.max_depth || depth < *params_.max_depth;
        if (!depth_ok || m < params_.min_samples_split || node.impurity == 0.0) return idx;

        total_ = counts;
        Best best;
        if (fpn_ >= bins_.cols()) {
            for (std::size_t f = 0; f < bins_.cols(); ++f) evaluate(f, lo, hi, best);
        } else {
            std::size_t remaining = order_.size(), informative = 0;
            while (informative < fpn_ && remaining > 0) {
                const auto r = static_cast<std::size_t>(uniform_index(*rng_, remaining));
                std::swap(order_[r], order_[remaining - 1]);
                --remaining;
                if (evaluate(order_[remaining], lo, hi, best)) ++informative;
            }
        }
        if (best.feature < 0) return idx;
        double parent_sq = 0;
        for (auto c : counts) parent_sq += static_cast<double>(c) * static_cast<double>(c);
        const double dm = static_cast<double>(m);
        if (best.score / dm - parent_sq / (dm * dm) <= 1e-12) return idx;

        const auto f = static_cast<std::size_t>(best.feature);
        const auto& vals = bins_.values(f);
        nodes_[static_cast<std::size_t>(idx)].feature = best.feature;
        nodes_[static_cast<std::size_t>(idx)].threshold = 0.5 * (vals[best.left_bin] + vals[best.right_bin]);
        auto mid = std::stable_partition(samples_.begin() + static_cast<std::ptrdiff_t>(lo),
                                         samples_.begin() + static_cast<std::ptrdiff_t>(hi),
                                         [&](std::size_t s) { return bins_.bin(s, f) <= best.left_bin; });
        const auto split = static_cast<std::size_t>(mid - samples_.begin());
        const int left = build(lo, split, depth + 1);
        const int right = build(split, hi, depth + 1);
        nodes_[static_cast<std::size_t>(idx)].left = left;
        nodes_[static_cast<std::size_t>(idx)].right = right;
        return idx;
    }

    // Scans candidate thresholds of feature f; returns false when f is
    // constant on the node.
    bool evaluate(std::size_t f, std::size_t lo, std::size_t hi, Best& best) {
        const auto n_bins = bins_.values(f).size();
        if (n_bins < 2) return false;
        const std::size_t m = hi - lo;
        left_.assign(c_, 0);
        std::size_t n_left = 0;
        bool have_prev = false;
        std::uint32_t prev_bin = 0;
        std::size_t groups = 0;

        auto visit = [&](std::uint32_t bin, const std::size_t* group_counts) {
            if (have_prev) {
                double sq_l = 0, sq_r = 0;
                for (std::size_t k = 0; k < c_; ++k) {
                    const double l = static_cast<double>(left_[k]);
                    const double r = static_cast<double>(total_[k] - left_[k]);
                    sq_l += l * l;
                    sq_r += r * r;
                }
                const double score =
                    sq_l / static_cast<double>(n_left) + sq_r / static_cast<double>(m - n_left);
                if (score > best.score) {
                    best.score = score;
                    best.feature = static_cast<int>(f);
                    best.left_bin = prev_bin;
                    best.right_bin = bin;
                }
            }
            for (std::size_t k = 0; k < c_; ++k) {
                left_[k] += group_counts[k];
                n_left += group_counts[k];
            }
            prev_bin = bin;
            have_prev = true;
            ++groups;
        };

        if (n_bins <= 2 * m) {
            hist_.assign(n_bins * c_, 0);
            std::uint32_t lo_bin = std::numeric_limits<std::uint32_t>::max(), hi_bin = 0;
            for (std::size_t s = lo; s < hi; ++s) {
                const auto row = samples_[s];
                const auto b = bins_.bin(row, f);
                ++hist_[b * c_ + static_cast<std::size_t>(labels_[row])];
                lo_bin = std::min(lo_bin, b);
                hi_bin = std::max(hi_bin, b);
            }
            if (lo_bin == hi_bin) return false;
            for (std::uint32_t b = lo_bin; b <= hi_bin; ++b) {
                const std::size_t* g = &hist_[b * c_];
                std::size_t tot = 0;
                for (std::size_t k = 0; k < c_; ++k) tot += g[k];
                if (tot) visit(b, g);
            }
        } else {
            pairs_.clear();
            for (std::size_t s = lo; s < hi; ++s) {
                const auto row = samples_[s];
                pairs_.emplace_back(bins_.bin(row, f), labels_[row]);
            }
            std::sort(pairs_.begin(), pairs_.end());
            if (pairs_.front().first == pairs_.back().first) return false;
            group_.assign(c_, 0);
            std::size_t k = 0;
            while (k < pairs_.size()) {
                const auto b = pairs_[k].first;
                std::fill(group_.begin(), group_.end(), 0);
                while (k < pairs_.size() && pairs_[k].first == b) ++group_[static_cast<std::size_t>(pairs_[k++].second)];
                visit(b, group_.data());
            }
        }
        return groups > 1;
    }

    const BinnedMatrix& bins_;
    const std::vector<int>& labels_;
    std::size_t c_;
    TreeParams params_;
    std::size_t fpn_;
    Rng* rng_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> samples_;
    std::vector<TreeNode> nodes_;
    std::vector<std::size_t> total_, left_, hist_, group_;
    std::vector<std::pair<std::uint32_t, int>> pairs_;
};

void check_training_input(const EncodedMatrix& data) {
    if (data.rows() == 0) throw EmptyDataError("cannot train on an empty matrix");
    if (data.labels.size() != data.rows()) throw InvalidArgument("label count does not match matrix rows");
    if (data.n_classes == 0) throw InvalidArgument("no classes");
}

}  // namespace

DecisionTree grow_tree(const BinnedMatrix& bins, const std::vector<int>& labels, std::size_t n_classes,
                       std::vector<std::size_t> samples, const TreeParams& params, std::size_t features_per_node,
                       Rng* rng) {
    if (samples.empty()) throw EmptyDataError("cannot grow a tree on zero samples");
    if (params.min_samples_split < 2) throw InvalidArgument("min_samples_split must be >= 2");
    if (params.max_depth && *params.max_depth < 0) throw InvalidArgument("max_depth must be positive");
    if (features_per_node < bins.cols() && !rng) throw InvalidArgument("feature subsampling needs a generator");
    Grower g(bins, labels, n_classes, params, features_per_node, rng);
    return DecisionTree(g.grow(std::move(samples)), bins.cols(), n_classes);
}

DecisionTree train_decision_tree(const EncodedMatrix& data, const TreeParams& params) {
    check_training_input(data);
    BinnedMatrix bins(data.x);
    std::vector<std::size_t> samples(data.rows());
    std::iota(samples.begin(), samples.end(), std::size_t{0});
    return grow_tree(bins, data.labels, data.n_classes, std::move(samples), params, bins.cols(), nullptr);
}

int DecisionTree::predict_row(const double* row, Eigen::Index stride) const {
    std::size_t k = 0;
    while (nodes_[k].feature >= 0) {
        const auto& n = nodes_[k];
        k = static_cast<std::size_t>(row[n.feature * stride] <= n.threshold ? n.left : n.right);
    }
    return nodes_[k].prediction;
}

std::vector<int> DecisionTree::predict(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != width_) throw InvalidArgument("matrix width does not match tree");
    std::vector<int> out(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = predict_row(x.data() + i, x.rows());
    return out;
}

int DecisionTree::depth() const {
    std::vector<int> d(nodes_.size(), 0);
    int best = 0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        best = std::max(best, d[k]);
        if (nodes_[k].feature >= 0) {
            d[static_cast<std::size_t>(nodes_[k].left)] = d[k] + 1;
            d[static_cast<std::size_t>(nodes_[k].right)] = d[k] + 1;
        }
    }
    return best;
}

bool DecisionTree::operator==(const DecisionTree& o) const {
    if (width_ != o.width_ || n_classes_ != o.n_classes_ || nodes_.size() != o.nodes_.size()) return false;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        const auto &a = nodes_[k], &b = o.nodes_[k];
        if (a.feature != b.feature || std::bit_cast<std::uint64_t>(a.threshold) != std::bit_cast<std::uint64_t>(b.threshold) ||
            a.left != b.left || a.right != b.right || a.prediction != b.prediction || a.samples != b.samples)
            return false;
    }
    return true;
}

nlohmann::json DecisionTree::to_json() const {
    auto node_json = [&](auto&& self, std::size_t k) -> nlohmann::json {
        const auto& n = nodes_[k];
        nlohmann::json j = {{"prediction", n.prediction}, {"samples", n.samples}, {"impurity", encode_hex_double(n.impurity)}};
        if (n.feature >= 0) {
            j["feature"] = n.feature;
            j["threshold"] = encode_hex_double(n.threshold);
            j["left"] = self(self, static_cast<std::size_t>(n.left));
            j["right"] = self(self, static_cast<std::size_t>(n.right));
        }
        return j;
    };
    return node_json(node_json, 0);
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j, std::size_t width, std::size_t n_classes) {
    std::vector<TreeNode> nodes;
    auto read = [&](auto&& self, const nlohmann::json& jn) -> int {
        const int idx = static_cast<int>(nodes.size());
        TreeNode n;
        n.prediction = jn.at("prediction").get<int>();
        n.samples = jn.at("samples").get<std::size_t>();
        n.impurity = decode_hex_double(jn.at("impurity").get<std::string>());
        if (n.prediction < 0 || static_cast<std::size_t>(n.prediction) >= n_classes)
            throw ParseError("tree leaf class out of range", 0);
        nodes.push_back(n);
        if (jn.contains("feature")) {
            const int f = jn.at("feature").get<int>();
            if (f < 0 || static_cast<std::size_t>(f) >= width) throw ParseError("tree split feature out of range", 0);
            nodes[static_cast<std::size_t>(idx)].feature = f;
            nodes[static_cast<std::size_t>(idx)].threshold = decode_hex_double(jn.at("threshold").get<std::string>());
            const int l = self(self, jn.at("left"));
            const int r = self(self, jn.at("right"));
            nodes[static_cast<std::size_t>(idx)].left = l;
            nodes[static_cast<std::size_t>(idx)].right = r;
        }
        return idx;
    };
    read(read, j);
    return DecisionTree(std::move(nodes), width, n_classes);
}

RandomForest train_random_forest(const EncodedMatrix& data, const ForestParams& params) {
    check_training_input(data);
    if (params.n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
    BinnedMatrix bins(data.x);
    const auto n = data.rows();
    const auto fpn = features_per_split(params.mtry, bins.cols());
    std::vector<DecisionTree> trees(params.n_trees);

    auto grow_one = [&](std::size_t t) {
        Rng rng = make_rng(substream(params.seed, t));
        std::vector<std::size_t> samples(n);
        if (params.bootstrap) {
            for (auto& s : samples) s = static_cast<std::size_t>(uniform_index(rng, n));
        } else {
            std::iota(samples.begin(), samples.end(), std::size_t{0});
        }
        trees[t] = grow_tree(bins, data.labels, data.n_classes, std::move(samples), params.tree, fpn, &rng);
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(params.threads, static_cast<unsigned>(params.n_trees)));
    if (threads == 1) {
        for (std::size_t t = 0; t < params.n_trees; ++t) grow_one(t);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t t = w; t < params.n_trees; t += threads) grow_one(t);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    return RandomForest(std::move(trees), data.n_classes);
}

std::vector<int> RandomForest::predict(const Matrix& x) const {
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<std::size_t> votes(n * n_classes_, 0);
    for (const auto& t : trees_) {
        if (static_cast<std::size_t>(x.cols()) != t.width()) throw InvalidArgument("matrix width does not match forest");
        for (std::size_t i = 0; i < n; ++i)
            ++votes[i * n_classes_ + static_cast<std::size_t>(t.predict_row(x.data() + i, x.rows()))];
    }
    std::vector<int> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto first = votes.begin() + static_cast<std::ptrdiff_t>(i * n_classes_);
        out[i] = static_cast<int>(std::max_element(first, first + static_cast<std::ptrdiff_t>(n_classes_)) - first);
    }
    return out;
}

}  // namespace mdi
