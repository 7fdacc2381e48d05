#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "gridcast/core/rng.hpp"

namespace gridcast::model {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense feed-forward network stored in a flat parameter span: per layer a
/// column-major weight matrix (out x in) followed by the bias. Hidden layers
/// use ReLU, the output layer is linear.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {}

    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t layers() const { return dims_.size() - 1; }
    std::size_t input() const { return dims_.front(); }
    std::size_t output() const { return dims_.back(); }

    std::size_t weight_offset(std::size_t l) const {
        std::size_t off = 0;
        for (std::size_t i = 0; i < l; ++i) off += dims_[i + 1] * dims_[i] + dims_[i + 1];
        return off;
    }
    std::size_t bias_offset(std::size_t l) const { return weight_offset(l) + dims_[l + 1] * dims_[l]; }
    std::size_t size() const { return weight_offset(layers()); }

    struct Cache {
        std::vector<Matrix> activations;  // [0] is the input
    };

    Matrix forward(const double* params, const Matrix& x, Cache* cache = nullptr) const {
        Matrix a = x;
        if (cache) {
            cache->activations.clear();
            cache->activations.push_back(x);
        }
        for (std::size_t l = 0; l < layers(); ++l) {
            Eigen::Map<const Matrix> w(params + weight_offset(l), static_cast<Eigen::Index>(dims_[l + 1]),
                                       static_cast<Eigen::Index>(dims_[l]));
            Eigen::Map<const Vector> b(params + bias_offset(l), static_cast<Eigen::Index>(dims_[l + 1]));
            Matrix z = w * a;
            z.colwise() += b;
            if (l + 1 < layers()) {
                a = z.cwiseMax(0.0);
                if (cache) cache->activations.push_back(a);
            } else {
                a = std::move(z);
            }
        }
        return a;
    }

    /// Accumulates parameter gradients into `grad` and returns the gradient
    /// with respect to the input.
    Matrix backward(const double* params, const Cache& cache, const Matrix& d_out, double* grad) const {
        Matrix g = d_out;
        for (std::size_t l = layers(); l-- > 0;) {
            const Matrix& a = cache.activations[l];
            Eigen::Map<const Matrix> w(params + weight_offset(l), static_cast<Eigen::Index>(dims_[l + 1]),
                                       static_cast<Eigen::Index>(dims_[l]));
            Eigen::Map<Matrix> dw(grad + weight_offset(l), static_cast<Eigen::Index>(dims_[l + 1]),
                                  static_cast<Eigen::Index>(dims_[l]));
            Eigen::Map<Vector> db(grad + bias_offset(l), static_cast<Eigen::Index>(dims_[l + 1]));
            dw.noalias() += g * a.transpose();
            db += g.rowwise().sum();
            Matrix da = w.transpose() * g;
            if (l > 0) {
                g = da.cwiseProduct((a.array() > 0.0).cast<double>().matrix());
            } else {
                g = std::move(da);
            }
        }
        return g;
    }

    /// Glorot-uniform weights, zero biases.
    void initialize(double* params, Rng& rng) const {
        for (std::size_t l = 0; l < layers(); ++l) {
            const double limit = std::sqrt(6.0 / static_cast<double>(dims_[l] + dims_[l + 1]));
            const std::size_t nw = dims_[l + 1] * dims_[l];
            double* w = params + weight_offset(l);
            for (std::size_t i = 0; i < nw; ++i) w[i] = rng.uniform(-limit, limit);
            double* b = params + bias_offset(l);
            for (std::size_t i = 0; i < dims_[l + 1]; ++i) b[i] = 0.0;
        }
    }

private:
    std::vector<std::size_t> dims_;
};

}  // namespace gridcast::model
