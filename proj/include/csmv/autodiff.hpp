#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace csmv::ad {

using Mat = Eigen::MatrixXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// One value in the computation graph. Gradients are lazily sized: an empty
// grad matrix means "zero so far".
struct Node {
    Mat value;
    Mat grad;
    bool needs_grad = false;
    std::function<void()> backprop;

    void accum_grad(const Mat& g) {
        if (!needs_grad) return;
        if (grad.size() == 0) {
            grad = g;
        } else {
            grad += g;
        }
    }

    void zero_grad() { grad.resize(0, 0); }
};

// Reverse-mode tape. Ops append nodes; creation order is a valid topological
// order, so backward() is a single reverse sweep. Parameter nodes live
// outside the tape (they only receive gradient accumulations).
class Tape {
public:
    explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

    bool grad_enabled() const { return grad_enabled_; }
    void set_grad_enabled(bool on) { grad_enabled_ = on; }

    // Constant leaf; never receives gradients.
    Node* input(Mat v);

    Node* matmul(Node* a, Node* b, bool trans_a = false, bool trans_b = false);
    Node* add(Node* a, Node* b);                  // same shape
    Node* add_rowvec(Node* a, Node* bias);        // bias is 1 x d, broadcast over rows
    Node* add_const(Node* a, const Mat& c);       // c is plain data, not a node
    Node* scale(Node* a, double s);
    Node* cmul(Node* a, Node* b);                 // elementwise
    Node* relu(Node* a);
    Node* sigmoid(Node* a);
    Node* tanh(Node* a);

    // Row-wise softmax; entries where allowed==false get probability 0.
    // A row with no allowed entry becomes all-zero (callers mask such rows
    // downstream). Pass nullptr for an unmasked softmax.
    Node* softmax_rows(Node* a, const BoolArray* allowed = nullptr);

    // Row-wise layer normalization with learnable 1 x d gain/offset.
    Node* layer_norm(Node* a, Node* gamma, Node* beta, double eps = 1e-5);

    Node* concat_cols(Node* a, Node* b);
    Node* concat_rows(const std::vector<Node*>& parts);
    Node* slice_rows(Node* a, Eigen::Index r0, Eigen::Index n);
    Node* slice_cols(Node* a, Eigen::Index c0, Eigen::Index n);

    // Rows move by `offset` (positive = down); vacated rows are zero.
    Node* shift_rows(Node* a, int offset);

    // Embedding lookup: row ids into `table`.
    Node* gather_rows(Node* table, std::vector<int> ids);

    // Column-wise max over all rows -> 1 x d. Ties break to the first row.
    Node* max_rows(Node* a);

    // Mean softmax cross-entropy over a batch of logit rows.
    Node* cross_entropy(Node* logits, const std::vector<int>& labels);

    void backward(Node* loss);

    void clear() { nodes_.clear(); }
    std::size_t size() const { return nodes_.size(); }

private:
    Node* make(Mat v, bool needs_grad);

    std::vector<std::unique_ptr<Node>> nodes_;
    bool grad_enabled_ = true;
};

// Central-difference gradient of `f` with respect to one coordinate of `x`.
// Test utility shared by the gradient-check suites.
double central_difference(const std::function<double()>& f, double* coord, double step = 1e-5);

}  // namespace csmv::ad
