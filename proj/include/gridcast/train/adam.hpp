#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>

namespace gridcast::train {

/// Adaptive-moment optimizer over one flat parameter vector.
class Adam {
public:
    Adam(Eigen::Index size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps),
          m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

    void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
        ++t_;
        m_ = b1_ * m_ + (1.0 - b1_) * grad;
        v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        theta.array() -= lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
    }

    std::int64_t steps() const { return t_; }

private:
    double lr_, b1_, b2_, eps_;
    Eigen::VectorXd m_, v_;
    std::int64_t t_ = 0;
};

}  // namespace gridcast::train
