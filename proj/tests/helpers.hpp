#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "genmetrics/error.hpp"
#include "genmetrics/featureset.hpp"
#include "genmetrics/rng.hpp"

namespace testutil {

inline genmetrics::FeatureSet normal_set(std::size_t n, std::size_t d, genmetrics::SeededRng& rng,
                                         double offset = 0.0, double scale = 1.0) {
    std::vector<double> data(n * d);
    for (auto& v : data) v = offset + scale * rng.normal();
    return genmetrics::FeatureSet(std::move(data), n, d);
}

// Values that survive the float32 round trip unchanged.
inline genmetrics::FeatureSet float_set(std::size_t n, std::size_t d, genmetrics::SeededRng& rng) {
    std::vector<double> data(n * d);
    for (auto& v : data) v = static_cast<float>(rng.normal());
    return genmetrics::FeatureSet(std::move(data), n, d);
}

inline genmetrics::FeatureSet points(std::vector<std::vector<double>> rows) {
    std::vector<double> data;
    for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
    const std::size_t d = rows.front().size();
    return genmetrics::FeatureSet(std::move(data), rows.size(), d);
}

inline genmetrics::FeatureSet softmax_rows(std::vector<std::vector<double>> rows) {
    std::vector<double> data;
    for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
    const std::size_t k = rows.front().size();
    return genmetrics::FeatureSet(std::move(data), rows.size(), k, genmetrics::SpaceTag::softmax);
}

inline genmetrics::FeatureSet one_hot(std::size_t rows, std::size_t k, const std::function<std::size_t(std::size_t)>& cls) {
    std::vector<double> data(rows * k, 0.0);
    for (std::size_t i = 0; i < rows; ++i) data[i * k + cls(i)] = 1.0;
    return genmetrics::FeatureSet(std::move(data), rows, k, genmetrics::SpaceTag::softmax);
}

}  // namespace testutil

#define EXPECT_ERROR_CODE(stmt, expected)                                                \
    do {                                                                                 \
        try {                                                                            \
            stmt;                                                                        \
            ADD_FAILURE() << "expected genmetrics::Error from " #stmt;                    \
        } catch (const genmetrics::Error& e_) {                                          \
            EXPECT_EQ(e_.code(), expected) << e_.what();                                 \
        }                                                                                \
    } while (0)
