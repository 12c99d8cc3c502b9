#pragma once

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfqa/index.hpp"

// Combines per-field relevance into the weighted document score
// f(q, d) = sum_i lambda_i * r(q_i, d_i) and selects the answer sentences.

namespace mfqa {

struct WeightVector {
    std::vector<double> lambda;  // schema order

    static WeightVector ones(std::size_t n) { return {std::vector<double>(n, 1.0)}; }
};

struct ScoreMatrix {
    std::vector<DocId> rows;                  // candidate order (most recent first)
    std::vector<std::vector<double>> cells;  // rows x fields; 0 when outside a field's top-k
};

struct RankedAnswer {
    DocId doc = 0;
    double f = 0.0;
    std::vector<double> contributions;  // lambda_i * r_i per field
};

// Per-field top-k over the candidates; rows are the union of returned doc
// ids, kept in candidate order. Cells missing from a field's top-k stay 0.
inline ScoreMatrix score_matrix(const QueryBundle& qb, std::span<const DocId> candidates,
                                const MultiFieldIndex& idx, int k = kDefaultTopK) {
    ScoreMatrix m;
    const std::size_t n_fields = qb.queries.size();
    std::vector<std::vector<FieldScore>> per_field(n_fields);
    std::vector<DocId> in_rows;
    for (std::size_t f = 0; f < n_fields; ++f) {
        per_field[f] = idx.top_k(f, qb.queries[f], candidates, k);
        for (const FieldScore& fs : per_field[f]) in_rows.push_back(fs.doc);
    }
    for (DocId d : candidates)
        if (std::find(in_rows.begin(), in_rows.end(), d) != in_rows.end()) m.rows.push_back(d);
    m.cells.assign(m.rows.size(), std::vector<double>(n_fields, 0.0));
    for (std::size_t f = 0; f < n_fields; ++f) {
        for (const FieldScore& fs : per_field[f]) {
            auto it = std::find(m.rows.begin(), m.rows.end(), fs.doc);
            m.cells[static_cast<std::size_t>(it - m.rows.begin())][f] = fs.r;
        }
    }
    return m;
}

// f per row, sorted descending; ties keep candidate (recency) order.
inline std::vector<RankedAnswer> rank(const ScoreMatrix& matrix, const WeightVector& weights,
                                      std::span<const DocId> candidate_order) {
    std::vector<RankedAnswer> out;
    std::vector<std::size_t> order;
    for (DocId d : candidate_order) {
        auto it = std::find(matrix.rows.begin(), matrix.rows.end(), d);
        if (it != matrix.rows.end()) order.push_back(static_cast<std::size_t>(it - matrix.rows.begin()));
    }
    if (order.size() != matrix.rows.size())
        throw std::runtime_error("score matrix contains rows outside the candidate order");
    for (std::size_t row : order) {
        const std::vector<double>& cells = matrix.cells[row];
        if (cells.size() != weights.lambda.size())
            throw std::runtime_error("weight vector length does not match matrix fields");
        RankedAnswer a;
        a.doc = matrix.rows[row];
        a.contributions.resize(cells.size());
        for (std::size_t f = 0; f < cells.size(); ++f) {
            a.contributions[f] = weights.lambda[f] * cells[f];
            a.f += a.contributions[f];
        }
        out.push_back(std::move(a));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RankedAnswer& a, const RankedAnswer& b) { return a.f > b.f; });
    return out;
}

// Top-3 predictions; an empty matrix falls back to the candidates in recency
// order with f = 0 so the ranker always answers when it can.
inline std::vector<RankedAnswer> answer(const QueryBundle& qb, std::span<const DocId> candidates,
                                        const MultiFieldIndex& idx, const WeightVector& weights,
                                        int k = kDefaultTopK) {
    ScoreMatrix m = score_matrix(qb, candidates, idx, k);
    std::vector<RankedAnswer> ranked;
    if (m.rows.empty()) {
        for (DocId d : candidates)
            ranked.push_back({d, 0.0, std::vector<double>(weights.lambda.size(), 0.0)});
    } else {
        ranked = rank(m, weights, candidates);
    }
    if (ranked.size() > 3) ranked.resize(3);
    return ranked;
}

}  // namespace mfqa
