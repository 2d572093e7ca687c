#include "csmv/autodiff.hpp"

#include <cmath>
#include <limits>

#include "csmv/errors.hpp"

namespace csmv::ad {

Node* Tape::make(Mat v, bool needs_grad) {
    auto node = std::make_unique<Node>();
    node->value = std::move(v);
    node->needs_grad = grad_enabled_ && needs_grad;
    nodes_.push_back(std::move(node));
    return nodes_.back().get();
}

Node* Tape::input(Mat v) { return make(std::move(v), false); }

Node* Tape::matmul(Node* a, Node* b, bool trans_a, bool trans_b) {
    const Mat& A = a->value;
    const Mat& B = b->value;
    const Eigen::Index ak = trans_a ? A.rows() : A.cols();
    const Eigen::Index bk = trans_b ? B.cols() : B.rows();
    if (ak != bk) throw DimMismatch("matmul: inner dimensions disagree");

    Mat c;
    if (!trans_a && !trans_b) c.noalias() = A * B;
    else if (trans_a && !trans_b) c.noalias() = A.transpose() * B;
    else if (!trans_a && trans_b) c.noalias() = A * B.transpose();
    else c.noalias() = A.transpose() * B.transpose();

    Node* out = make(std::move(c), a->needs_grad || b->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, b, out, trans_a, trans_b]() {
            const Mat& g = out->grad;
            if (a->needs_grad) {
                if (!trans_a && !trans_b) a->accum_grad(g * b->value.transpose());
                else if (trans_a && !trans_b) a->accum_grad(b->value * g.transpose());
                else if (!trans_a && trans_b) a->accum_grad(g * b->value);
                else a->accum_grad(b->value.transpose() * g.transpose());
            }
            if (b->needs_grad) {
                if (!trans_a && !trans_b) b->accum_grad(a->value.transpose() * g);
                else if (trans_a && !trans_b) b->accum_grad(a->value * g);
                else if (!trans_a && trans_b) b->accum_grad(g.transpose() * a->value);
                else b->accum_grad(g.transpose() * a->value.transpose());
            }
        };
    }
    return out;
}

Node* Tape::add(Node* a, Node* b) {
    if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols())
        throw DimMismatch("add: shapes disagree");
    Node* out = make(a->value + b->value, a->needs_grad || b->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, b, out]() {
            if (a->needs_grad) a->accum_grad(out->grad);
            if (b->needs_grad) b->accum_grad(out->grad);
        };
    }
    return out;
}

Node* Tape::add_rowvec(Node* a, Node* bias) {
    if (bias->value.rows() != 1 || bias->value.cols() != a->value.cols())
        throw DimMismatch("add_rowvec: bias must be 1 x cols(a)");
    Node* out = make(a->value.rowwise() + bias->value.row(0), a->needs_grad || bias->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, bias, out]() {
            if (a->needs_grad) a->accum_grad(out->grad);
            if (bias->needs_grad) bias->accum_grad(out->grad.colwise().sum());
        };
    }
    return out;
}

Node* Tape::add_const(Node* a, const Mat& c) {
    if (a->value.rows() != c.rows() || a->value.cols() != c.cols())
        throw DimMismatch("add_const: shapes disagree");
    Node* out = make(a->value + c, a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out]() { a->accum_grad(out->grad); };
    }
    return out;
}

Node* Tape::scale(Node* a, double s) {
    Node* out = make(a->value * s, a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out, s]() { a->accum_grad(out->grad * s); };
    }
    return out;
}

Node* Tape::cmul(Node* a, Node* b) {
    if (a->value.rows() != b->value.rows() || a->value.cols() != b->value.cols())
        throw DimMismatch("cmul: shapes disagree");
    Node* out = make(a->value.cwiseProduct(b->value), a->needs_grad || b->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, b, out]() {
            if (a->needs_grad) a->accum_grad(out->grad.cwiseProduct(b->value));
            if (b->needs_grad) b->accum_grad(out->grad.cwiseProduct(a->value));
        };
    }
    return out;
}

Node* Tape::relu(Node* a) {
    Node* out = make(a->value.cwiseMax(0.0), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out]() {
            a->accum_grad((a->value.array() > 0.0).select(out->grad, Mat::Zero(out->grad.rows(), out->grad.cols())));
        };
    }
    return out;
}

Node* Tape::sigmoid(Node* a) {
    Mat y = (1.0 / (1.0 + (-a->value.array()).exp())).matrix();
    Node* out = make(std::move(y), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out]() {
            a->accum_grad((out->grad.array() * out->value.array() * (1.0 - out->value.array())).matrix());
        };
    }
    return out;
}

Node* Tape::tanh(Node* a) {
    Node* out = make(a->value.array().tanh().matrix(), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out]() {
            a->accum_grad((out->grad.array() * (1.0 - out->value.array().square())).matrix());
        };
    }
    return out;
}

Node* Tape::softmax_rows(Node* a, const BoolArray* allowed) {
    const Mat& x = a->value;
    if (allowed && (allowed->rows() != x.rows() || allowed->cols() != x.cols()))
        throw DimMismatch("softmax_rows: mask shape disagrees");

    Mat y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (!allowed || (*allowed)(r, c)) mx = std::max(mx, x(r, c));
        }
        if (!std::isfinite(mx)) {  // no allowed key: emit a zero row
            y.row(r).setZero();
            continue;
        }
        double z = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            if (!allowed || (*allowed)(r, c)) {
                y(r, c) = std::exp(x(r, c) - mx);
                z += y(r, c);
            } else {
                y(r, c) = 0.0;
            }
        }
        y.row(r) /= z;
    }

    Node* out = make(std::move(y), a->needs_grad);
    if (out->needs_grad) {
        // dX = Y .* (dY - rowsum(dY .* Y)); masked entries have Y == 0.
        out->backprop = [a, out]() {
            const Mat& yv = out->value;
            Eigen::VectorXd dot = (out->grad.array() * yv.array()).rowwise().sum();
            Mat dx = yv.array() * (out->grad.array().colwise() - dot.array());
            a->accum_grad(dx);
        };
    }
    return out;
}

Node* Tape::layer_norm(Node* a, Node* gamma, Node* beta, double eps) {
    const Mat& x = a->value;
    const Eigen::Index d = x.cols();
    if (gamma->value.cols() != d || beta->value.cols() != d)
        throw DimMismatch("layer_norm: gain/offset width disagrees");

    auto xhat = std::make_shared<Mat>(x.rows(), d);
    auto inv_sigma = std::make_shared<Eigen::VectorXd>(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mu = x.row(r).mean();
        const double var = (x.row(r).array() - mu).square().mean();
        const double is = 1.0 / std::sqrt(var + eps);
        (*inv_sigma)(r) = is;
        xhat->row(r) = (x.row(r).array() - mu) * is;
    }
    Mat y = (xhat->array().rowwise() * gamma->value.row(0).array()).rowwise() + beta->value.row(0).array();

    Node* out = make(std::move(y), a->needs_grad || gamma->needs_grad || beta->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, gamma, beta, out, xhat, inv_sigma]() {
            const Mat& g = out->grad;
            if (beta->needs_grad) beta->accum_grad(g.colwise().sum());
            if (gamma->needs_grad) gamma->accum_grad((g.array() * xhat->array()).colwise().sum().matrix());
            if (a->needs_grad) {
                const Eigen::Index d = g.cols();
                Mat gy = g.array().rowwise() * gamma->value.row(0).array();  // dL/dxhat
                Eigen::VectorXd m1 = gy.rowwise().mean();
                Eigen::VectorXd m2 = (gy.array() * xhat->array()).rowwise().mean();
                Mat dx(g.rows(), d);
                for (Eigen::Index r = 0; r < g.rows(); ++r) {
                    dx.row(r) = ((gy.row(r).array() - m1(r)) - xhat->row(r).array() * m2(r)) * (*inv_sigma)(r);
                }
                a->accum_grad(dx);
            }
        };
    }
    return out;
}

Node* Tape::concat_cols(Node* a, Node* b) {
    if (a->value.rows() != b->value.rows()) throw DimMismatch("concat_cols: row counts disagree");
    Mat y(a->value.rows(), a->value.cols() + b->value.cols());
    y << a->value, b->value;
    Node* out = make(std::move(y), a->needs_grad || b->needs_grad);
    if (out->needs_grad) {
        const Eigen::Index ac = a->value.cols();
        out->backprop = [a, b, out, ac]() {
            if (a->needs_grad) a->accum_grad(out->grad.leftCols(ac));
            if (b->needs_grad) b->accum_grad(out->grad.rightCols(out->grad.cols() - ac));
        };
    }
    return out;
}

Node* Tape::concat_rows(const std::vector<Node*>& parts) {
    Eigen::Index rows = 0;
    bool ng = false;
    for (Node* p : parts) {
        rows += p->value.rows();
        ng = ng || p->needs_grad;
        if (p->value.cols() != parts.front()->value.cols())
            throw DimMismatch("concat_rows: column counts disagree");
    }
    Mat y(rows, parts.front()->value.cols());
    Eigen::Index r = 0;
    for (Node* p : parts) {
        y.middleRows(r, p->value.rows()) = p->value;
        r += p->value.rows();
    }
    Node* out = make(std::move(y), ng);
    if (out->needs_grad) {
        std::vector<Node*> ps = parts;
        out->backprop = [ps, out]() {
            Eigen::Index r = 0;
            for (Node* p : ps) {
                if (p->needs_grad) p->accum_grad(out->grad.middleRows(r, p->value.rows()));
                r += p->value.rows();
            }
        };
    }
    return out;
}

Node* Tape::slice_rows(Node* a, Eigen::Index r0, Eigen::Index n) {
    Node* out = make(a->value.middleRows(r0, n), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out, r0, n]() {
            Mat g = Mat::Zero(a->value.rows(), a->value.cols());
            g.middleRows(r0, n) = out->grad;
            a->accum_grad(g);
        };
    }
    return out;
}

Node* Tape::slice_cols(Node* a, Eigen::Index c0, Eigen::Index n) {
    Node* out = make(a->value.middleCols(c0, n), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out, c0, n]() {
            Mat g = Mat::Zero(a->value.rows(), a->value.cols());
            g.middleCols(c0, n) = out->grad;
            a->accum_grad(g);
        };
    }
    return out;
}

Node* Tape::shift_rows(Node* a, int offset) {
    const Eigen::Index n = a->value.rows();
    Mat y = Mat::Zero(n, a->value.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index src = r - offset;
        if (src >= 0 && src < n) y.row(r) = a->value.row(src);
    }
    Node* out = make(std::move(y), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out, offset, n]() {
            Mat g = Mat::Zero(n, a->value.cols());
            for (Eigen::Index r = 0; r < n; ++r) {
                const Eigen::Index src = r - offset;
                if (src >= 0 && src < n) g.row(src) += out->grad.row(r);
            }
            a->accum_grad(g);
        };
    }
    return out;
}

Node* Tape::gather_rows(Node* table, std::vector<int> ids) {
    Mat y(static_cast<Eigen::Index>(ids.size()), table->value.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= table->value.rows())
            throw IdOutOfRange("gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                               std::to_string(table->value.rows()) + " rows");
        y.row(static_cast<Eigen::Index>(i)) = table->value.row(ids[i]);
    }
    Node* out = make(std::move(y), table->needs_grad);
    if (out->needs_grad) {
        out->backprop = [table, out, ids = std::move(ids)]() {
            Mat g = Mat::Zero(table->value.rows(), table->value.cols());
            for (std::size_t i = 0; i < ids.size(); ++i) g.row(ids[i]) += out->grad.row(static_cast<Eigen::Index>(i));
            table->accum_grad(g);
        };
    }
    return out;
}

Node* Tape::max_rows(Node* a) {
    const Mat& x = a->value;
    Mat y(1, x.cols());
    std::vector<Eigen::Index> arg(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        Eigen::Index best = 0;
        for (Eigen::Index r = 1; r < x.rows(); ++r) {
            if (x(r, c) > x(best, c)) best = r;
        }
        arg[static_cast<std::size_t>(c)] = best;
        y(0, c) = x(best, c);
    }
    Node* out = make(std::move(y), a->needs_grad);
    if (out->needs_grad) {
        out->backprop = [a, out, arg = std::move(arg)]() {
            Mat g = Mat::Zero(a->value.rows(), a->value.cols());
            for (Eigen::Index c = 0; c < g.cols(); ++c) g(arg[static_cast<std::size_t>(c)], c) = out->grad(0, c);
            a->accum_grad(g);
        };
    }
    return out;
}

Node* Tape::cross_entropy(Node* logits, const std::vector<int>& labels) {
    const Mat& x = logits->value;
    if (x.rows() != static_cast<Eigen::Index>(labels.size()))
        throw DimMismatch("cross_entropy: one label per logit row required");

    auto probs = std::make_shared<Mat>(x.rows(), x.cols());
    double total = 0.0;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const int label = labels[static_cast<std::size_t>(r)];
        if (label < 0 || label >= x.cols())
            throw LabelOutOfRange("cross_entropy: label " + std::to_string(label) + " outside " +
                                  std::to_string(x.cols()) + " classes");
        const double mx = x.row(r).maxCoeff();
        const Eigen::ArrayXd e = (x.row(r).array() - mx).exp();
        const double z = e.sum();
        probs->row(r) = (e / z).matrix();
        total += std::log(z) + mx - x(r, label);
    }
    total /= static_cast<double>(x.rows());

    Node* out = make(Mat::Constant(1, 1, total), logits->needs_grad);
    if (out->needs_grad) {
        std::vector<int> ls = labels;
        out->backprop = [logits, out, probs, ls = std::move(ls)]() {
            Mat g = *probs;
            for (Eigen::Index r = 0; r < g.rows(); ++r) g(r, ls[static_cast<std::size_t>(r)]) -= 1.0;
            g *= out->grad(0, 0) / static_cast<double>(g.rows());
            logits->accum_grad(g);
        };
    }
    return out;
}

void Tape::backward(Node* loss) {
    if (loss->value.size() != 1) throw DimMismatch("backward: loss must be scalar");
    loss->grad = Mat::Ones(1, 1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        Node* n = it->get();
        if (n->backprop && n->grad.size() != 0) n->backprop();
    }
}

double central_difference(const std::function<double()>& f, double* coord, double step) {
    const double saved = *coord;
    *coord = saved + step;
    const double up = f();
    *coord = saved - step;
    const double down = f();
    *coord = saved;
    return (up - down) / (2.0 * step);
}

}  // namespace csmv::ad
