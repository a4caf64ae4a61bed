#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "answer_graph.hpp"
#include "error.hpp"

namespace gapflood {

/// A candidate alignment (model node, student node).
struct NodePair {
    NodeIndex model = 0;
    NodeIndex student = 0;
    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

/// Dense |V_M| x |V_S| score table; entries default to 0.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    SimilarityMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& at(std::size_t r, std::size_t c) {
        check(r, c);
        return data_[r * cols_ + c];
    }
    double at(std::size_t r, std::size_t c) const {
        check(r, c);
        return data_[r * cols_ + c];
    }
    double at(NodePair p) const { return at(p.model, p.student); }

private:
    void check(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw ContractViolation("similarity matrix index out of range");
    }

    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

} // namespace gapflood
