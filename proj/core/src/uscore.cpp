#include "survey/uscore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace survey {

namespace {

constexpr double kTieEps = 1e-12;

// Min-cost perfect assignment on a square cost matrix (augmenting paths with
// potentials). Returns the assignment column for each row.
std::vector<int> hungarian(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = -1;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// Maximum achievable total IoU over valid (pred, gt) pairs, with some
// indices excluded (already fixed elsewhere). Unmatched items are free:
// the weight matrix is padded with zero-weight dummies.
double max_total_iou(const std::vector<std::vector<double>>& weight,
                     const std::vector<char>& pred_used, const std::vector<char>& gt_used) {
    std::vector<int> preds, gts;
    for (int i = 0; i < static_cast<int>(pred_used.size()); ++i)
        if (!pred_used[i]) preds.push_back(i);
    for (int j = 0; j < static_cast<int>(gt_used.size()); ++j)
        if (!gt_used[j]) gts.push_back(j);
    const int n = static_cast<int>(preds.size());
    const int m = static_cast<int>(gts.size());
    const int N = n + m;
    if (N == 0) return 0.0;

    // Costs are negated weights; dummy rows/columns cost 0.
    std::vector<std::vector<double>> cost(N, std::vector<double>(N, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < m; ++b) cost[a][b] = -weight[preds[a]][gts[b]];

    const auto assign = hungarian(cost);
    double total = 0.0;
    for (int a = 0; a < n; ++a)
        if (assign[a] >= 0 && assign[a] < m) total += weight[preds[a]][gts[assign[a]]];
    return total;
}

}  // namespace

MatchResult match_detections(const std::vector<Detection>& preds,
                             const std::vector<Detection>& gts, double iou_threshold) {
    const int n = static_cast<int>(preds.size());
    const int m = static_cast<int>(gts.size());

    // weight[i][j] > 0 iff (i,j) is an admissible pair.
    std::vector<std::vector<double>> weight(n, std::vector<double>(m, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            if (preds[i].class_id != gts[j].class_id) continue;
            const double v = iou(preds[i].bbox, gts[j].bbox);
            if (v >= iou_threshold) weight[i][j] = v;
        }

    std::vector<char> pred_used(n, false), gt_used(m, false);
    const double optimum = max_total_iou(weight, pred_used, gt_used);

    // Lexicographic refinement: fix pairs in (pred, gt) order whenever doing
    // so keeps the optimum attainable.
    MatchResult result;
    double fixed_total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (gt_used[j] || weight[i][j] <= 0.0) continue;
            pred_used[i] = true;
            gt_used[j] = true;
            const double rest = max_total_iou(weight, pred_used, gt_used);
            if (fixed_total + weight[i][j] + rest >= optimum - kTieEps) {
                fixed_total += weight[i][j];
                result.matched.emplace_back(i, j, weight[i][j]);
                break;
            }
            pred_used[i] = false;
            gt_used[j] = false;
        }
    }

    for (int i = 0; i < n; ++i)
        if (!pred_used[i]) result.unmatched_preds.push_back(i);
    for (int j = 0; j < m; ++j)
        if (!gt_used[j]) result.unmatched_gts.push_back(j);
    return result;
}

double u_score(const std::vector<Detection>& preds, const std::vector<Detection>& gts,
               const MatchResult& m) {
    const std::size_t n_matched = m.matched.size();
    if (n_matched > preds.size() || n_matched > gts.size())
        throw std::invalid_argument("u_score: match result inconsistent with inputs");
    if (preds.empty() && gts.empty()) return 0.0;

    double acc = 0.0;
    for (const auto& [pi, gi, pair_iou] : m.matched)
        acc += 1.0 - preds[pi].confidence * pair_iou;
    acc += static_cast<double>(m.unmatched_gts.size());
    for (int pi : m.unmatched_preds) acc += std::min(1.0, 0.5 + preds[pi].confidence);

    const double denom =
        static_cast<double>(preds.size() + gts.size() - n_matched);
    return acc / std::max(denom, 1.0);
}

double u_score(const std::vector<Detection>& preds, const std::vector<Detection>& gts,
               double iou_threshold) {
    return u_score(preds, gts, match_detections(preds, gts, iou_threshold));
}

}  // namespace survey
