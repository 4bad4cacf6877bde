#pragma once

#include "noperr/grid.hpp"
#include "noperr/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace noperr {

enum class ActKind { ReLU, LeakyReLU, GELU, Identity, Tanh };

struct Activation {
    ActKind kind = ActKind::GELU;
    double slope = 0.01;  // LeakyReLU only

    double operator()(double x) const;
    std::string name() const;
    // "relu", "leaky_relu", "leaky_relu:0.2", "gelu", "identity", "tanh"
    static Activation parse(const std::string& s);
};

// pointwise two-layer network x -> W2 act(W1 x + b1) + b2
struct PointwiseMlp {
    Eigen::MatrixXd W1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd W2;
    Eigen::VectorXd b2;
    Activation hidden{ActKind::Tanh};

    std::size_t d_in() const { return std::size_t(W1.cols()); }
    std::size_t d_out() const { return std::size_t(W2.rows()); }
    void validate() const;
    static PointwiseMlp identity(std::size_t width);
};

struct Layer {
    Eigen::MatrixXd W;
    Eigen::VectorXd b;
    Kernel kernel;
    Activation act;

    std::size_t d_in() const { return std::size_t(W.cols()); }
    std::size_t d_out() const { return std::size_t(W.rows()); }
    void validate() const;
};

// Carries no resolution: the same model runs on any grid.
struct OperatorModel {
    int dim = 1;
    PointwiseMlp lift;
    std::vector<Layer> layers;
    PointwiseMlp project;

    std::size_t depth() const { return layers.size(); }
    void validate() const;
};

enum class ConvKind { SampledKernelDFT, AnalyticSpectrum, AnalyticSpectrumCutoff };

struct ConvMode {
    ConvKind kind = ConvKind::AnalyticSpectrum;
    std::size_t cutoff = 0;

    static ConvMode sampled() { return {ConvKind::SampledKernelDFT, 0}; }
    static ConvMode analytic() { return {ConvKind::AnalyticSpectrum, 0}; }
    static ConvMode analytic_cutoff(std::size_t k) { return {ConvKind::AnalyticSpectrumCutoff, k}; }
    std::string name() const;
    static ConvMode parse(const std::string& s, std::size_t cutoff = 0);
};

// A layer bound to one resolution and convolution mode. All kernel spectra
// are precomputed here so repeated forward passes only pay for the FFTs.
class LayerPlan {
public:
    LayerPlan(const Layer& layer, int dim, std::size_t n, ConvMode mode);

    GridField apply(const GridField& v) const;
    // W v + K_N * v (+ b); affine in v, so the activation argument of a
    // perturbed input can be assembled from two passes
    GridField preactivation(const GridField& v, bool with_bias = true) const;
    GridField convolve(const GridField& v) const;
    // multiply a spectrum by the layer's effective kernel spectrum
    SpectralField multiply(const SpectralField& V) const;

    // op norms of the effective grid kernel K_N(x) at every grid point
    std::vector<double> kernel_opnorms() const;
    // max_xi |K_N_hat(xi)|_op over resolved modes
    double spectrum_sup() const;

    const Layer& layer() const { return *layer_; }
    std::size_t n() const { return n_; }

private:
    struct SparseMode {
        std::size_t index;
        Eigen::MatrixXcd m;
    };
    // per-axis table of complex scalars for every mode q and sign, all N indices
    struct AxisTable {
        Eigen::MatrixXcd plus, minus;  // modes x N
    };

    const Layer* layer_;
    int dim_;
    std::size_t n_;
    ConvMode mode_;
    bool sparse_ = false;
    std::vector<SparseMode> sparse_modes_;
    std::vector<AxisTable> axes_;  // SS-NO full-spectrum modes

    Eigen::MatrixXcd axis_matrix(int axis, std::size_t j) const;
    Eigen::MatrixXcd spectrum_at(std::size_t flat) const;
    // per-axis spatial matrices m_i(x_i) of the effective kernel
    std::vector<std::vector<Eigen::MatrixXcd>> axis_kernel() const;
    std::vector<std::vector<Eigen::MatrixXcd>> axis_mats_;  // product form, 2D
    Eigen::MatrixXcd Cp_, Cm_, Bp_, Bm_;  // d_out x K and K x d_in
};

class StackPlan {
public:
    StackPlan(const OperatorModel& model, std::size_t n, ConvMode mode);

    GridField lift(const GridField& a) const;
    GridField project(const GridField& v) const;
    // v_0 -> v_T; states receives v_0..v_T when given
    GridField run_layers(const GridField& v0, std::vector<GridField>* states = nullptr) const;
    GridField apply(const GridField& a, std::vector<GridField>* states = nullptr) const;

    const std::vector<LayerPlan>& layers() const { return layers_; }
    const OperatorModel& model() const { return *model_; }
    std::size_t n() const { return n_; }
    ConvMode mode() const { return mode_; }

private:
    const OperatorModel* model_;
    std::size_t n_;
    ConvMode mode_;
    std::vector<LayerPlan> layers_;
};

GridField pointwise_mlp(const PointwiseMlp& mlp, const GridField& x);
GridField layer_apply(const Layer& layer, const GridField& v, ConvMode mode);

struct StackOutput {
    GridField u;
    std::optional<std::vector<GridField>> states;  // v_0..v_T
};
StackOutput stack_apply(const OperatorModel& model, const GridField& a, ConvMode mode, bool capture);

enum class KernelKind { SSNOSum, SSNOProduct, FNO };
KernelKind parse_kernel_kind(const std::string& s);
std::string kernel_kind_name(KernelKind k);

struct Architecture {
    int dim = 1;
    std::size_t depth = 3;
    std::size_t d_a = 1;
    std::size_t channels = 32;
    std::size_t d_u = 1;
    KernelKind kernel = KernelKind::SSNOSum;
    std::size_t modes = 16;
    Activation act;
};

OperatorModel model_random_init(const Architecture& arch, std::uint64_t seed);

}  // namespace noperr
