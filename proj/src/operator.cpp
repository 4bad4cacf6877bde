#include "noperr/operator.hpp"

#include "noperr/fft.hpp"
#include "noperr/linalg.hpp"
#include "noperr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace noperr {

namespace {

using ColMap = Eigen::Map<Eigen::MatrixXd>;
using ConstColMap = Eigen::Map<const Eigen::MatrixXd>;
using CColMap = Eigen::Map<Eigen::MatrixXcd>;
using ConstCColMap = Eigen::Map<const Eigen::MatrixXcd>;

// channel-fastest storage is a column-major (channels x points) matrix
ConstColMap as_matrix(const GridField& f) {
    return {f.values().data(), Eigen::Index(f.channels()), Eigen::Index(f.points())};
}
ColMap as_matrix(GridField& f) { return {f.values().data(), Eigen::Index(f.channels()), Eigen::Index(f.points())}; }
ConstCColMap as_matrix(const SpectralField& f) {
    return {f.coeffs().data(), Eigen::Index(f.channels()), Eigen::Index(f.points())};
}
CColMap as_matrix(SpectralField& f) { return {f.coeffs().data(), Eigen::Index(f.channels()), Eigen::Index(f.points())}; }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

double Activation::operator()(double x) const {
    switch (kind) {
        case ActKind::ReLU: return x > 0 ? x : 0.0;
        case ActKind::LeakyReLU: return x > 0 ? x : slope * x;
        case ActKind::GELU: return 0.5 * x * std::erfc(-x / std::numbers::sqrt2);
        case ActKind::Identity: return x;
        case ActKind::Tanh: return std::tanh(x);
    }
    return x;
}

std::string Activation::name() const {
    switch (kind) {
        case ActKind::ReLU: return "relu";
        case ActKind::LeakyReLU: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "leaky_relu:%g", slope);
            return buf;
        }
        case ActKind::GELU: return "gelu";
        case ActKind::Identity: return "identity";
        case ActKind::Tanh: return "tanh";
    }
    return "?";
}

Activation Activation::parse(const std::string& s) {
    if (s == "relu") return {ActKind::ReLU};
    if (s == "gelu") return {ActKind::GELU};
    if (s == "identity") return {ActKind::Identity};
    if (s == "tanh") return {ActKind::Tanh};
    if (s.rfind("leaky_relu", 0) == 0) {
        Activation a{ActKind::LeakyReLU};
        if (s.size() > 10) {
            if (s[10] != ':') throw DomainError("bad activation '" + s + "'");
            a.slope = std::stod(s.substr(11));
        }
        return a;
    }
    throw DomainError("unknown activation '" + s + "'");
}

void PointwiseMlp::validate() const {
    if (W1.rows() != b1.size() || W2.cols() != W1.rows() || W2.rows() != b2.size())
        throw StructuralError("pointwise MLP shapes are inconsistent");
}

PointwiseMlp PointwiseMlp::identity(std::size_t width) {
    PointwiseMlp m;
    m.W1 = Eigen::MatrixXd::Identity(width, width);
    m.b1 = Eigen::VectorXd::Zero(width);
    m.W2 = Eigen::MatrixXd::Identity(width, width);
    m.b2 = Eigen::VectorXd::Zero(width);
    m.hidden = {ActKind::Identity};
    return m;
}

void Layer::validate() const {
    if (W.rows() != b.size()) throw StructuralError("layer bias length differs from W rows");
    if (kernel_d_out(kernel) != d_out() || kernel_d_in(kernel) != d_in())
        throw StructuralError("kernel channel shape differs from W");
    if (auto* f = std::get_if<FNOKernel>(&kernel)) f->validate(1e-9);
    else std::get<SSNOKernel>(kernel).validate();
}

void OperatorModel::validate() const {
    lift.validate();
    project.validate();
    std::size_t width = lift.d_out();
    for (std::size_t t = 0; t < layers.size(); ++t) {
        layers[t].validate();
        if (kernel_dim(layers[t].kernel) != dim) throw StructuralError("layer kernel dimension differs from model");
        if (layers[t].d_in() != width)
            throw StructuralError("layer " + std::to_string(t) + " expects " + std::to_string(layers[t].d_in()) +
                                  " channels, gets " + std::to_string(width));
        width = layers[t].d_out();
    }
    if (project.d_in() != width) throw StructuralError("projection input width differs from last layer");
}

std::string ConvMode::name() const {
    switch (kind) {
        case ConvKind::SampledKernelDFT: return "sampled";
        case ConvKind::AnalyticSpectrum: return "analytic";
        case ConvKind::AnalyticSpectrumCutoff: return "cutoff";
    }
    return "?";
}

ConvMode ConvMode::parse(const std::string& s, std::size_t cutoff) {
    if (s == "sampled") return sampled();
    if (s == "analytic") return analytic();
    if (s == "cutoff") {
        if (cutoff == 0) throw DomainError("cutoff mode needs a positive K_cutoff");
        return analytic_cutoff(cutoff);
    }
    throw DomainError("unknown convolution mode '" + s + "'");
}

LayerPlan::LayerPlan(const Layer& layer, int dim, std::size_t n, ConvMode mode)
    : layer_(&layer), dim_(dim), n_(n), mode_(mode) {
    check_grid_shape(dim, n);
    if (kernel_dim(layer.kernel) != dim) throw StructuralError("kernel dimension differs from grid");
    if (mode.kind == ConvKind::AnalyticSpectrumCutoff && (mode.cutoff == 0 || mode.cutoff > n / 2))
        throw DomainError("K_cutoff must lie in [1, N/2], got " + std::to_string(mode.cutoff) + " at N=" +
                          std::to_string(n));
    const long half = static_cast<long>(n / 2);

    if (auto* f = std::get_if<FNOKernel>(&layer.kernel)) {
        sparse_ = true;
        if (mode.kind != ConvKind::SampledKernelDFT && static_cast<long>(f->modes) > half)
            throw DomainError("FNO modes K exceed N/2");
        std::map<std::size_t, Eigen::MatrixXcd> acc;
        for (std::size_t b = 0; b < f->block_count(); ++b) {
            Frequency k = f->block_frequency(b);
            if (mode.kind != ConvKind::SampledKernelDFT) {
                // analytic: only the centered representatives are resolved
                bool resolved = true;
                for (int i = 0; i < dim; ++i)
                    if (k.xi[i] == half) resolved = false;
                if (!resolved) continue;
                if (mode.kind == ConvKind::AnalyticSpectrumCutoff && k.max_abs() >= long(mode.cutoff)) continue;
            }
            // sampled: the grid DFT folds k onto k mod N
            auto it = acc.find(k.index(n));
            if (it == acc.end()) acc.emplace(k.index(n), f->block(k));
            else it->second += f->block(k);
        }
        for (auto& [idx, m] : acc) sparse_modes_.push_back({idx, std::move(m)});
        return;
    }

    const auto& k = std::get<SSNOKernel>(layer.kernel);
    const std::size_t Q = k.modes;
    Cp_.resize(k.d_out, Q);
    Cm_.resize(k.d_out, Q);
    Bp_.resize(Q, k.d_in);
    Bm_.resize(Q, k.d_in);
    for (std::size_t q = 0; q < Q; ++q) {
        Cp_.col(q) = k.cp(q).cast<cplx>();
        Cm_.col(q) = k.cm(q).cast<cplx>();
        Bp_.row(q) = k.bp(q).transpose().cast<cplx>();
        Bm_.row(q) = k.bm(q).transpose().cast<cplx>();
    }

    if (mode.kind == ConvKind::AnalyticSpectrumCutoff) {
        sparse_ = true;
        const long kc = static_cast<long>(mode.cutoff);
        const std::size_t P = grid_points(dim, n);
        for (std::size_t flat = 0; flat < P; ++flat) {
            Frequency xi = Frequency::from_index(flat, dim, n);
            if (xi.max_abs() >= kc) continue;
            if (dim == 2 && k.form == SSNOForm::Sum && xi.xi[0] != 0 && xi.xi[1] != 0) continue;
            sparse_modes_.push_back({flat, ssno_fourier_coeff(k, xi)});
        }
        return;
    }

    axes_.resize(dim);
    for (int i = 0; i < dim; ++i) {
        auto& tab = axes_[i];
        tab.plus.resize(Q, n);
        tab.minus.resize(Q, n);
        if (mode.kind == ConvKind::AnalyticSpectrum) {
            for (std::size_t q = 0; q < Q; ++q)
                for (std::size_t j = 0; j < n; ++j) {
                    double xi = double(centered_index(j, n));
                    tab.plus(q, j) = ssno_f_plus(k.damping(q, i), k.freq(q, i), xi);
                    tab.minus(q, j) = ssno_f_minus(k.damping(q, i), k.freq(q, i), xi);
                }
        } else {
            // normalized 1D DFT of the sampled directional profiles
            std::vector<cplx> g(2 * Q * n), G(2 * Q * n);
            for (std::size_t j = 0; j < n; ++j) {
                double z = wrap_coordinate(j, n);
                for (std::size_t q = 0; q < Q; ++q) {
                    g[j * 2 * Q + q] = ssno_profile(k.damping(q, i), k.freq(q, i), z, true);
                    g[j * 2 * Q + Q + q] = ssno_profile(k.damping(q, i), k.freq(q, i), z, false);
                }
            }
            fft::transform(1, n, 2 * Q, -1, g.data(), G.data());
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t q = 0; q < Q; ++q) {
                    tab.plus(q, j) = G[j * 2 * Q + q] / double(n);
                    tab.minus(q, j) = G[j * 2 * Q + Q + q] / double(n);
                }
        }
        for (std::size_t q = 0; q < Q; ++q) {
            double ph = k.phase[q * dim + i];
            cplx a = ph == 0.0 ? cplx(k.amp(q, i), 0.0) : std::polar(k.amp(q, i), ph);
            tab.plus.row(q) *= a;
            tab.minus.row(q) *= a;
        }
    }
    if (dim == 2 && k.form == SSNOForm::Product) {
        axis_mats_.assign(2, std::vector<Eigen::MatrixXcd>(n));
        for (int i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < n; ++j) axis_mats_[i][j] = axis_matrix(i, j);
    }
}

Eigen::MatrixXcd LayerPlan::axis_matrix(int axis, std::size_t j) const {
    const auto& tab = axes_[axis];
    return Cp_ * tab.plus.col(j).asDiagonal() * Bp_ + Cm_ * tab.minus.col(j).asDiagonal() * Bm_;
}

SpectralField LayerPlan::multiply(const SpectralField& V) const {
    const Layer& L = *layer_;
    if (V.dim() != dim_ || V.n() != n_) throw StructuralError("spectrum resolution differs from layer plan");
    if (V.channels() != L.d_in()) throw StructuralError("spectrum channel count differs from layer input");
    SpectralField W(dim_, n_, L.d_out());
    auto Vm = as_matrix(V);
    auto Wm = as_matrix(W);
    if (sparse_) {
        for (const auto& s : sparse_modes_) Wm.col(s.index).noalias() = s.m * Vm.col(s.index);
        return W;
    }
    const auto& k = std::get<SSNOKernel>(L.kernel);
    if (dim_ == 1) {
        Eigen::MatrixXcd bp = (Bp_ * Vm).cwiseProduct(axes_[0].plus);
        Eigen::MatrixXcd bm = (Bm_ * Vm).cwiseProduct(axes_[0].minus);
        Wm.noalias() = Cp_ * bp;
        Wm.noalias() += Cm_ * bm;
        return W;
    }
    if (k.form == SSNOForm::Sum) {
        // each axis acts on the line where the other frequency vanishes
        for (int i = 0; i < 2; ++i) {
            Eigen::MatrixXcd line(V.channels(), n_);
            for (std::size_t j = 0; j < n_; ++j) line.col(j) = Vm.col(i == 0 ? j * n_ : j);
            Eigen::MatrixXcd bp = (Bp_ * line).cwiseProduct(axes_[i].plus);
            Eigen::MatrixXcd bm = (Bm_ * line).cwiseProduct(axes_[i].minus);
            Eigen::MatrixXcd out = Cp_ * bp + Cm_ * bm;
            for (std::size_t j = 0; j < n_; ++j) Wm.col(i == 0 ? j * n_ : j) += out.col(j);
        }
        return W;
    }
    for (std::size_t a = 0; a < n_; ++a)
        for (std::size_t b = 0; b < n_; ++b)
            Wm.col(a * n_ + b).noalias() = axis_mats_[0][a].cwiseProduct(axis_mats_[1][b]) * Vm.col(a * n_ + b);
    return W;
}

Eigen::MatrixXcd LayerPlan::spectrum_at(std::size_t flat) const {
    const Layer& L = *layer_;
    if (sparse_) {
        for (const auto& s : sparse_modes_)
            if (s.index == flat) return s.m;
        return Eigen::MatrixXcd::Zero(L.d_out(), L.d_in());
    }
    if (dim_ == 1) return axis_matrix(0, flat);
    std::size_t a = flat / n_, b = flat % n_;
    const auto& k = std::get<SSNOKernel>(L.kernel);
    if (k.form == SSNOForm::Product) return axis_mats_[0][a].cwiseProduct(axis_mats_[1][b]);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(L.d_out(), L.d_in());
    if (b == 0) m += axis_matrix(0, a);
    if (a == 0) m += axis_matrix(1, b);
    return m;
}

double LayerPlan::spectrum_sup() const {
    double best = 0;
    if (sparse_) {
        for (const auto& s : sparse_modes_) best = std::max(best, spectral_norm(s.m));
        return best;
    }
    Eigen::VectorXcd x;
    const std::size_t P = grid_points(dim_, n_);
    const auto& k = std::get<SSNOKernel>(layer_->kernel);
    for (std::size_t f = 0; f < P; ++f) {
        if (dim_ == 2 && k.form == SSNOForm::Sum && f / n_ != 0 && f % n_ != 0) continue;
        best = std::max(best, spectral_norm_warm(spectrum_at(f), x));
    }
    return best;
}

std::vector<std::vector<Eigen::MatrixXcd>> LayerPlan::axis_kernel() const {
    // inverse 1D transform of the per-axis scalar tables
    const std::size_t Q = Bp_.rows();
    std::vector<std::vector<Eigen::MatrixXcd>> out(dim_, std::vector<Eigen::MatrixXcd>(n_));
    for (int i = 0; i < dim_; ++i) {
        std::vector<cplx> in(2 * Q * n_), sp(2 * Q * n_);
        for (std::size_t j = 0; j < n_; ++j)
            for (std::size_t q = 0; q < Q; ++q) {
                in[j * 2 * Q + q] = axes_[i].plus(q, j);
                in[j * 2 * Q + Q + q] = axes_[i].minus(q, j);
            }
        fft::transform(1, n_, 2 * Q, +1, in.data(), sp.data());
        for (std::size_t j = 0; j < n_; ++j) {
            Eigen::Map<const Eigen::VectorXcd> p(sp.data() + j * 2 * Q, Q), m(sp.data() + j * 2 * Q + Q, Q);
            out[i][j] = Cp_ * p.asDiagonal() * Bp_ + Cm_ * m.asDiagonal() * Bm_;
        }
    }
    return out;
}

std::vector<double> LayerPlan::kernel_opnorms() const {
    const std::size_t P = grid_points(dim_, n_);
    std::vector<double> out(P);
    Eigen::VectorXcd x;
    if (sparse_) {
        const Layer& L = *layer_;
        Eigen::MatrixXcd m(L.d_out(), L.d_in());
        for (std::size_t p = 0; p < P; ++p) {
            m.setZero();
            std::size_t p0 = dim_ == 1 ? p : p / n_, p1 = dim_ == 1 ? 0 : p % n_;
            for (const auto& s : sparse_modes_) {
                std::size_t f0 = dim_ == 1 ? s.index : s.index / n_, f1 = dim_ == 1 ? 0 : s.index % n_;
                // phase e^{2 pi i xi.x}, integer arithmetic mod N keeps it exact
                std::size_t t = (f0 * p0 + f1 * p1) % n_;
                m += std::polar(1.0, kTwoPi * double(t) / double(n_)) * s.m;
            }
            out[p] = spectral_norm_warm(m, x);
        }
        return out;
    }
    auto ax = axis_kernel();
    const auto& k = std::get<SSNOKernel>(layer_->kernel);
    for (std::size_t p = 0; p < P; ++p) {
        if (dim_ == 1) {
            out[p] = spectral_norm_warm(ax[0][p], x);
            continue;
        }
        std::size_t a = p / n_, b = p % n_;
        Eigen::MatrixXcd m = k.form == SSNOForm::Sum ? Eigen::MatrixXcd(ax[0][a] + ax[1][b])
                                                     : Eigen::MatrixXcd(ax[0][a].cwiseProduct(ax[1][b]));
        out[p] = spectral_norm_warm(m, x);
    }
    return out;
}

GridField LayerPlan::convolve(const GridField& v) const {
    return dft_inverse_real_part(multiply(dft_forward(v)));
}

GridField LayerPlan::preactivation(const GridField& v, bool with_bias) const {
    const Layer& L = *layer_;
    if (v.dim() != dim_ || v.n() != n_) throw StructuralError("field resolution differs from layer plan");
    if (v.channels() != L.d_in())
        throw StructuralError("layer expects " + std::to_string(L.d_in()) + " channels, field has " +
                              std::to_string(v.channels()));
    GridField out = convolve(v);
    auto Y = as_matrix(out);
    Y.noalias() += L.W * as_matrix(v);
    if (with_bias) Y.colwise() += L.b;
    return out;
}

GridField LayerPlan::apply(const GridField& v) const {
    GridField out = preactivation(v, true);
    const Activation act = layer_->act;
    if (act.kind != ActKind::Identity)
        for (auto& y : out.values()) y = act(y);
    return out;
}

GridField pointwise_mlp(const PointwiseMlp& mlp, const GridField& x) {
    if (x.channels() != mlp.d_in()) throw StructuralError("MLP input width differs from field channels");
    Eigen::MatrixXd h = mlp.W1 * as_matrix(x);
    h.colwise() += mlp.b1;
    if (mlp.hidden.kind != ActKind::Identity) h = h.unaryExpr([&](double t) { return mlp.hidden(t); });
    GridField out(x.dim(), x.n(), mlp.d_out());
    auto Y = as_matrix(out);
    Y.noalias() = mlp.W2 * h;
    Y.colwise() += mlp.b2;
    return out;
}

GridField layer_apply(const Layer& layer, const GridField& v, ConvMode mode) {
    return LayerPlan(layer, v.dim(), v.n(), mode).apply(v);
}

StackPlan::StackPlan(const OperatorModel& model, std::size_t n, ConvMode mode)
    : model_(&model), n_(n), mode_(mode) {
    model.validate();
    layers_.reserve(model.layers.size());
    for (const auto& l : model.layers) layers_.emplace_back(l, model.dim, n, mode);
}

GridField StackPlan::lift(const GridField& a) const { return pointwise_mlp(model_->lift, a); }
GridField StackPlan::project(const GridField& v) const { return pointwise_mlp(model_->project, v); }

GridField StackPlan::run_layers(const GridField& v0, std::vector<GridField>* states) const {
    if (states) {
        states->clear();
        states->push_back(v0);
    }
    GridField v = v0;
    for (const auto& l : layers_) {
        v = l.apply(v);
        if (states) states->push_back(v);
    }
    return v;
}

GridField StackPlan::apply(const GridField& a, std::vector<GridField>* states) const {
    if (a.n() != n_ || a.dim() != model_->dim) throw StructuralError("input grid differs from stack plan");
    return project(run_layers(lift(a), states));
}

StackOutput stack_apply(const OperatorModel& model, const GridField& a, ConvMode mode, bool capture) {
    StackPlan plan(model, a.n(), mode);
    StackOutput out;
    if (capture) {
        std::vector<GridField> states;
        out.u = plan.apply(a, &states);
        out.states = std::move(states);
    } else {
        out.u = plan.apply(a);
    }
    return out;
}

KernelKind parse_kernel_kind(const std::string& s) {
    if (s == "ssno-sum" || s == "ssno") return KernelKind::SSNOSum;
    if (s == "ssno-product") return KernelKind::SSNOProduct;
    if (s == "fno") return KernelKind::FNO;
    throw DomainError("unknown kernel kind '" + s + "'");
}

std::string kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::SSNOSum: return "ssno-sum";
        case KernelKind::SSNOProduct: return "ssno-product";
        case KernelKind::FNO: return "fno";
    }
    return "?";
}

namespace {

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, double sd, std::uint64_t seed) {
    CounterRng rng(seed, 0x3a7);
    Eigen::MatrixXd m(rows, cols);
    // fill row by row so the layout of the draw sequence matches the file layout
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, sd);
    return m;
}

PointwiseMlp random_mlp(std::size_t d_in, std::size_t d_out, std::uint64_t seed) {
    PointwiseMlp m;
    std::size_t hidden = 2 * std::max(d_in, d_out);
    m.W1 = gaussian_matrix(hidden, d_in, 1.0 / std::sqrt(double(d_in)), derive_seed(seed, 1));
    m.b1 = Eigen::VectorXd::Zero(hidden);
    m.W2 = gaussian_matrix(d_out, hidden, 1.0 / std::sqrt(double(hidden)), derive_seed(seed, 2));
    m.b2 = Eigen::VectorXd::Zero(d_out);
    m.hidden = {ActKind::Tanh};
    return m;
}

}  // namespace

OperatorModel model_random_init(const Architecture& arch, std::uint64_t seed) {
    check_grid_shape(arch.dim, 2);
    if (arch.channels == 0 || arch.d_a == 0 || arch.d_u == 0) throw StructuralError("channel widths must be positive");
    OperatorModel m;
    m.dim = arch.dim;
    m.lift = random_mlp(arch.d_a, arch.channels, derive_seed(seed, 0x11f7));
    m.project = random_mlp(arch.channels, arch.d_u, derive_seed(seed, 0x9e0));
    const std::size_t H = arch.channels;
    for (std::size_t t = 0; t < arch.depth; ++t) {
        std::uint64_t ls = derive_seed(seed, 100 + t);
        Layer L;
        L.W = gaussian_matrix(H, H, 1.0 / std::sqrt(double(H)), derive_seed(ls, 1));
        L.b = Eigen::VectorXd::Zero(H);
        L.act = arch.act;
        switch (arch.kernel) {
            case KernelKind::SSNOSum:
                L.kernel = ssno_random(arch.dim, SSNOForm::Sum, arch.modes, H, H, derive_seed(ls, 2));
                break;
            case KernelKind::SSNOProduct:
                L.kernel = ssno_random(arch.dim, SSNOForm::Product, arch.modes, H, H, derive_seed(ls, 2));
                break;
            case KernelKind::FNO:
                L.kernel = fno_random(arch.dim, arch.modes, H, H, derive_seed(ls, 2));
                break;
        }
        m.layers.push_back(std::move(L));
    }
    return m;
}

}  // namespace noperr
