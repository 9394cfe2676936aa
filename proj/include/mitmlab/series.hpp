#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "mitmlab/linalg.hpp"

namespace mitmlab {

/// Time-indexed sequence of dim-vectors in one contiguous buffer.
class Series {
public:
    Series() = default;
    explicit Series(int dim, std::size_t length = 0) : dim_(dim), data_(static_cast<std::size_t>(dim) * length, 0.0) {}

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
    bool empty() const noexcept { return data_.empty(); }

    Eigen::Map<const Eigen::VectorXd> operator[](std::size_t k) const {
        return Eigen::Map<const Eigen::VectorXd>(data_.data() + k * static_cast<std::size_t>(dim_), dim_);
    }
    Eigen::Map<Eigen::VectorXd> operator[](std::size_t k) {
        return Eigen::Map<Eigen::VectorXd>(data_.data() + k * static_cast<std::size_t>(dim_), dim_);
    }

    template <typename Derived>
    void push_back(const Eigen::MatrixBase<Derived>& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) data_.push_back(v(i));
    }

    void reserve(std::size_t length) { data_.reserve(length * static_cast<std::size_t>(dim_)); }
    void truncate(std::size_t length) { data_.resize(length * static_cast<std::size_t>(dim_)); }
    const std::vector<double>& raw() const noexcept { return data_; }

    friend bool operator==(const Series&, const Series&) = default;

private:
    int dim_ = 0;
    std::vector<double> data_;
};

/// Time-indexed sequence of dim×dim matrices (column-major each).
class MatrixSeries {
public:
    MatrixSeries() = default;
    explicit MatrixSeries(int dim) : dim_(dim) {}

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept {
        return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_ * dim_);
    }

    Eigen::Map<const Eigen::MatrixXd> operator[](std::size_t k) const {
        return Eigen::Map<const Eigen::MatrixXd>(data_.data() + k * static_cast<std::size_t>(dim_ * dim_), dim_, dim_);
    }

    void push_back(const Mat& m) { data_.insert(data_.end(), m.data(), m.data() + m.size()); }
    void reserve(std::size_t length) { data_.reserve(length * static_cast<std::size_t>(dim_ * dim_)); }
    void truncate(std::size_t length) { data_.resize(length * static_cast<std::size_t>(dim_ * dim_)); }

    friend bool operator==(const MatrixSeries&, const MatrixSeries&) = default;

private:
    int dim_ = 0;
    std::vector<double> data_;
};

}  // namespace mitmlab
