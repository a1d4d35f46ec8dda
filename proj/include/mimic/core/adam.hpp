#pragma once

#include <Eigen/Core>

namespace mimic {

// Plain Adam over a flat parameter vector. Deterministic; state is owned by
// the caller's loop.
class Adam {
public:
    Adam(Eigen::Index size, double step_size, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8)
        : lr_(step_size), beta1_(beta1), beta2_(beta2), eps_(eps),
          m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
        ++t_;
        m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
        v_ = beta2_ * v_.array().matrix() + (1.0 - beta2_) * grad.cwiseProduct(grad);
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        params.array() -=
            lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
    }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    Eigen::VectorXd m_, v_;
};

} // namespace mimic
