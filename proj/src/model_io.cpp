#include "noperr/io.hpp"

#include <fstream>
#include <sstream>

namespace noperr {

namespace {

// arrays are stored as {"shape": [...], "data": [...]}, row-major
json array_json(const std::vector<std::size_t>& shape, const std::vector<double>& data) {
    return json{{"shape", shape}, {"data", data}};
}

json matrix_json(const Eigen::MatrixXd& m) {
    std::vector<double> d;
    d.reserve(m.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) d.push_back(m(r, c));
    return array_json({std::size_t(m.rows()), std::size_t(m.cols())}, d);
}

json vector_json(const Eigen::VectorXd& v) {
    return array_json({std::size_t(v.size())}, std::vector<double>(v.data(), v.data() + v.size()));
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ModelLoadError(where + ": missing key '" + key + "'");
    return j.at(key);
}

std::vector<double> array_data(const json& j, const std::vector<std::size_t>& shape, const std::string& where) {
    std::vector<std::size_t> got;
    std::vector<double> data;
    try {
        got = need(j, "shape", where).get<std::vector<std::size_t>>();
        data = need(j, "data", where).get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ModelLoadError(where + ": " + e.what());
    }
    if (got != shape) {
        std::string a, b;
        for (auto s : got) a += std::to_string(s) + " ";
        for (auto s : shape) b += std::to_string(s) + " ";
        throw ModelLoadError(where + ": shape [" + a + "] expected [" + b + "]");
    }
    std::size_t count = 1;
    for (auto s : shape) count *= s;
    if (data.size() != count) throw ModelLoadError(where + ": data length does not match shape");
    return data;
}

std::vector<std::size_t> shape_of(const json& j, const std::string& where) {
    try {
        return need(j, "shape", where).get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
        throw ModelLoadError(where + ": " + e.what());
    }
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& where) {
    auto shape = shape_of(j, where);
    if (shape.size() != 2) throw ModelLoadError(where + ": expected a 2D array");
    auto d = array_data(j, shape, where);
    Eigen::MatrixXd m(shape[0], shape[1]);
    for (std::size_t r = 0; r < shape[0]; ++r)
        for (std::size_t c = 0; c < shape[1]; ++c) m(r, c) = d[r * shape[1] + c];
    return m;
}

Eigen::VectorXd vector_from(const json& j, const std::string& where) {
    auto shape = shape_of(j, where);
    if (shape.size() != 1) throw ModelLoadError(where + ": expected a 1D array");
    auto d = array_data(j, shape, where);
    return Eigen::Map<Eigen::VectorXd>(d.data(), Eigen::Index(d.size()));
}

json activation_json(const Activation& a) {
    json j;
    switch (a.kind) {
        case ActKind::ReLU: j["kind"] = "relu"; break;
        case ActKind::LeakyReLU:
            j["kind"] = "leaky_relu";
            j["slope"] = a.slope;
            break;
        case ActKind::GELU: j["kind"] = "gelu"; break;
        case ActKind::Identity: j["kind"] = "identity"; break;
        case ActKind::Tanh: j["kind"] = "tanh"; break;
    }
    return j;
}

Activation activation_from(const json& j, const std::string& where) {
    try {
        std::string kind = j.is_string() ? j.get<std::string>() : need(j, "kind", where).get<std::string>();
        Activation a = Activation::parse(kind == "leaky_relu" ? std::string("leaky_relu") : kind);
        if (a.kind == ActKind::LeakyReLU && j.is_object() && j.contains("slope")) a.slope = j.at("slope").get<double>();
        return a;
    } catch (const json::exception& e) {
        throw ModelLoadError(where + ": " + e.what());
    } catch (const DomainError& e) {
        throw ModelLoadError(where + ": " + e.what());
    }
}

json mlp_json(const PointwiseMlp& m) {
    return json{{"W1", matrix_json(m.W1)},
                {"b1", vector_json(m.b1)},
                {"W2", matrix_json(m.W2)},
                {"b2", vector_json(m.b2)},
                {"hidden_activation", activation_json(m.hidden)}};
}

PointwiseMlp mlp_from(const json& j, const std::string& where) {
    PointwiseMlp m;
    m.W1 = matrix_from(need(j, "W1", where), where + ".W1");
    m.b1 = vector_from(need(j, "b1", where), where + ".b1");
    m.W2 = matrix_from(need(j, "W2", where), where + ".W2");
    m.b2 = vector_from(need(j, "b2", where), where + ".b2");
    m.hidden = j.contains("hidden_activation") ? activation_from(j.at("hidden_activation"), where + ".hidden_activation")
                                               : Activation{ActKind::Tanh};
    try {
        m.validate();
    } catch (const StructuralError& e) {
        throw ModelLoadError(where + ": " + e.what());
    }
    return m;
}

template <class T>
T get_as(const json& j, const char* key, const std::string& where) {
    try {
        return need(j, key, where).get<T>();
    } catch (const json::exception& e) {
        throw ModelLoadError(where + "." + key + ": " + e.what());
    }
}

}  // namespace

json field_to_json(const GridField& f) {
    return json{{"dim", f.dim()},
                {"n", f.n()},
                {"channels", f.channels()},
                {"layout", "row-major over axes, channel fastest"},
                {"values", std::vector<double>(f.values().begin(), f.values().end())}};
}

GridField field_from_json(const json& j) {
    const std::string w = "field";
    return GridField(get_as<int>(j, "dim", w), get_as<std::size_t>(j, "n", w), get_as<std::size_t>(j, "channels", w),
                     get_as<std::vector<double>>(j, "values", w));
}

json kernel_to_json(const Kernel& kern) {
    if (auto* f = std::get_if<FNOKernel>(&kern)) {
        std::vector<double> re, im;
        for (const auto& c : f->weights) {
            re.push_back(c.real());
            im.push_back(c.imag());
        }
        std::vector<std::size_t> shape(f->dim, f->side());
        shape.push_back(f->d_out);
        shape.push_back(f->d_in);
        return json{{"type", "fno"},        {"dim", f->dim},   {"modes", f->modes}, {"d_out", f->d_out},
                    {"d_in", f->d_in},      {"P_re", array_json(shape, re)}, {"P_im", array_json(shape, im)}};
    }
    const auto& k = std::get<SSNOKernel>(kern);
    std::vector<std::size_t> per_dir{k.modes, std::size_t(k.dim)};
    json j{{"type", "ssno"},
           {"form", k.form == SSNOForm::Sum ? "sum" : "product"},
           {"dim", k.dim},
           {"modes", k.modes},
           {"d_out", k.d_out},
           {"d_in", k.d_in},
           {"c", array_json(per_dir, k.c)},
           {"rho", array_json(per_dir, k.rho)},
           {"omega", array_json(per_dir, k.omega)},
           {"C_plus", array_json({k.modes, k.d_out}, k.c_plus)},
           {"B_plus", array_json({k.modes, k.d_in}, k.b_plus)},
           {"C_minus", array_json({k.modes, k.d_out}, k.c_minus)},
           {"B_minus", array_json({k.modes, k.d_in}, k.b_minus)}};
    bool any_phase = false;
    for (double p : k.phase) any_phase = any_phase || p != 0.0;
    if (any_phase) j["phase"] = array_json(per_dir, k.phase);
    return j;
}

Kernel kernel_from_json(const json& j) {
    const std::string w = "kernel";
    std::string type = get_as<std::string>(j, "type", w);
    int dim = get_as<int>(j, "dim", w);
    std::size_t K = get_as<std::size_t>(j, "modes", w);
    std::size_t d_out = get_as<std::size_t>(j, "d_out", w), d_in = get_as<std::size_t>(j, "d_in", w);
    if (dim != 1 && dim != 2) throw ModelLoadError("kernel.dim must be 1 or 2");
    if (type == "fno") {
        FNOKernel f(dim, K, d_out, d_in);
        std::vector<std::size_t> shape(dim, f.side());
        shape.push_back(d_out);
        shape.push_back(d_in);
        auto re = array_data(need(j, "P_re", w), shape, w + ".P_re");
        auto im = array_data(need(j, "P_im", w), shape, w + ".P_im");
        for (std::size_t i = 0; i < re.size(); ++i) f.weights[i] = cplx(re[i], im[i]);
        try {
            f.validate(1e-9);
        } catch (const std::exception& e) {
            throw ModelLoadError(w + ": " + e.what());
        }
        return f;
    }
    if (type != "ssno") throw ModelLoadError("kernel.type must be 'fno' or 'ssno', got '" + type + "'");
    std::string form = get_as<std::string>(j, "form", w);
    if (form != "sum" && form != "product") throw ModelLoadError("kernel.form must be 'sum' or 'product'");
    SSNOKernel k(dim, form == "sum" ? SSNOForm::Sum : SSNOForm::Product, K, d_out, d_in);
    std::vector<std::size_t> per_dir{K, std::size_t(dim)};
    k.c = array_data(need(j, "c", w), per_dir, w + ".c");
    k.rho = array_data(need(j, "rho", w), per_dir, w + ".rho");
    k.omega = array_data(need(j, "omega", w), per_dir, w + ".omega");
    if (j.contains("phase")) k.phase = array_data(j.at("phase"), per_dir, w + ".phase");
    k.c_plus = array_data(need(j, "C_plus", w), {K, d_out}, w + ".C_plus");
    k.b_plus = array_data(need(j, "B_plus", w), {K, d_in}, w + ".B_plus");
    k.c_minus = array_data(need(j, "C_minus", w), {K, d_out}, w + ".C_minus");
    k.b_minus = array_data(need(j, "B_minus", w), {K, d_in}, w + ".B_minus");
    try {
        k.validate();
    } catch (const std::exception& e) {
        throw ModelLoadError(w + ": " + e.what());
    }
    return k;
}

json model_to_json(const OperatorModel& m) {
    json layers = json::array();
    for (const auto& l : m.layers)
        layers.push_back(json{{"W", matrix_json(l.W)},
                              {"b", vector_json(l.b)},
                              {"kernel", kernel_to_json(l.kernel)},
                              {"activation", activation_json(l.act)}});
    std::vector<std::size_t> widths{m.lift.d_out()};
    for (const auto& l : m.layers) widths.push_back(l.d_out());
    return json{{"format", "noperr-model"},
                {"version", kModelFormatVersion},
                {"arch",
                 {{"dim", m.dim}, {"depth", m.layers.size()}, {"d_a", m.lift.d_in()}, {"widths", widths},
                  {"d_u", m.project.d_out()}}},
                {"lift", mlp_json(m.lift)},
                {"layers", layers},
                {"project", mlp_json(m.project)}};
}

OperatorModel model_from_json(const json& j) {
    if (!j.is_object()) throw ModelLoadError("model file: top level must be an object");
    if (!j.contains("version")) throw ModelLoadError("model file: missing 'version'");
    int version = get_as<int>(j, "version", "model");
    if (version != kModelFormatVersion)
        throw ModelLoadError("model file: version " + std::to_string(version) + " not supported (expected " +
                             std::to_string(kModelFormatVersion) + ")");
    OperatorModel m;
    const json& arch = need(j, "arch", "model");
    m.dim = get_as<int>(arch, "dim", "arch");
    m.lift = mlp_from(need(j, "lift", "model"), "lift");
    m.project = mlp_from(need(j, "project", "model"), "project");
    const json& layers = need(j, "layers", "model");
    if (!layers.is_array()) throw ModelLoadError("model.layers must be an array");
    for (std::size_t t = 0; t < layers.size(); ++t) {
        std::string w = "layers[" + std::to_string(t) + "]";
        Layer l;
        l.W = matrix_from(need(layers[t], "W", w), w + ".W");
        l.b = vector_from(need(layers[t], "b", w), w + ".b");
        l.kernel = kernel_from_json(need(layers[t], "kernel", w));
        l.act = activation_from(need(layers[t], "activation", w), w + ".activation");
        m.layers.push_back(std::move(l));
    }
    try {
        m.validate();
    } catch (const std::exception& e) {
        throw ModelLoadError(std::string("model file: ") + e.what());
    }
    return m;
}

void model_save(const OperatorModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file " + path);
    out << model_to_json(m).dump(1) << "\n";
}

OperatorModel model_load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelLoadError("cannot open model file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelLoadError(path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace noperr
