#pragma once

#include <initializer_list>

#include "mitmlab/linalg.hpp"

namespace testing {

inline mitmlab::Vec vec(std::initializer_list<double> values) {
    mitmlab::Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v(i++) = x;
    return v;
}

inline mitmlab::Mat mat(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    mitmlab::Mat m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (double x : row) m(i, j++) = x;
        ++i;
    }
    return m;
}

inline mitmlab::Mat scalar(double a) { return mitmlab::Mat::Constant(1, 1, a); }

}  // namespace testing
