#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fakesat/boost.hpp"
#include "fakesat/dataset.hpp"
#include "fakesat/detector.hpp"
#include "fakesat/errors.hpp"
#include "fakesat/heatmap.hpp"
#include "fakesat/model_io.hpp"
#include "fakesat/perturb.hpp"
#include "fakesat/pixelhop.hpp"
#include "fakesat/saab.hpp"

namespace py = pybind11;
using namespace fakesat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Image image_from_array(const Array& a) {
    if (a.ndim() != 3 || a.shape(2) != kColorChannels) throw ShapeError("expected an (H, W, 3) array");
    Image img(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), img.data().begin());
    return img;
}

Array array_from_image(const Image& img) {
    Array a({static_cast<py::ssize_t>(img.height()), static_cast<py::ssize_t>(img.width()),
             static_cast<py::ssize_t>(kColorChannels)});
    std::copy(img.data().begin(), img.data().end(), a.mutable_data());
    return a;
}

Matrix matrix_from_array(const Array& a) {
    if (a.ndim() != 2) throw ShapeError("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

Label parse_label(const std::string& s) {
    if (s == "real") return Label::Real;
    if (s == "fake") return Label::Fake;
    if (s == "unknown") return Label::Unknown;
    throw ConfigError("label must be 'real', 'fake' or 'unknown'");
}

py::dict metrics_dict(const Metrics& m) {
    py::dict d;
    d["tp"] = m.tp;
    d["fp"] = m.fp;
    d["fn"] = m.fn;
    d["tn"] = m.tn;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    return d;
}

py::dict size_dict(const SizeReport& r) {
    py::dict d;
    d["design"] = r.design;
    d["selected_channels"] = r.selected_channels;
    d["filter_params"] = r.filter_params;
    d["channelwise_params"] = r.channelwise_params;
    d["ensemble_params"] = r.ensemble_params;
    d["total"] = r.total;
    return d;
}

Array heatmap_array(const HeatMap& map) {
    Array a({static_cast<py::ssize_t>(map.height), static_cast<py::ssize_t>(map.width)});
    std::copy(map.scores.begin(), map.scores.end(), a.mutable_data());
    return a;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Saab/PixelHop fake satellite image detector";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

    py::class_<Tile>(m, "Tile")
        .def(py::init([](const Array& pixels, const std::string& label, std::string id) {
                 return make_tile(image_from_array(pixels), parse_label(label), std::move(id));
             }),
             py::arg("pixels"), py::arg("label") = "unknown", py::arg("id") = "")
        .def_property_readonly("pixels", [](const Tile& t) { return array_from_image(t.pixels); })
        .def_property_readonly("label", [](const Tile& t) { return std::string(to_string(t.label)); })
        .def_readonly("id", &Tile::id)
        .def("__repr__", [](const Tile& t) {
            return "<Tile " + t.id + " " + std::to_string(t.height()) + "x" + std::to_string(t.width()) + " " +
                   std::string(to_string(t.label)) + ">";
        });

    m.def("load_tile", [](const std::filesystem::path& p, const std::string& label) { return load_tile(p, parse_label(label)); },
          py::arg("path"), py::arg("label") = "unknown");
    m.def("decode_image", [](const py::bytes& b) {
        const std::string s = b;
        return array_from_image(decode_image(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
    });
    m.def("load_dataset", &load_dataset, py::arg("root"));
    m.def("synth_tiles", [](int n, std::uint64_t seed, int size) { return synth_tiles({n, seed, size}); },
          py::arg("n_per_class") = 200, py::arg("seed") = 1, py::arg("size") = 64);
    m.def("apply_perturbation",
          [](const Array& pixels, const std::string& spec, std::uint64_t seed) {
              PerturbationConfig p = parse_perturbation(spec);
              p.seed = seed;
              return array_from_image(apply_perturbation(make_tile(image_from_array(pixels), Label::Unknown, ""), p).pixels);
          },
          py::arg("pixels"), py::arg("spec"), py::arg("seed") = 0);
    m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));

    py::class_<SaabFilterBank>(m, "FilterBank")
        .def_property_readonly("dim", &SaabFilterBank::dim)
        .def_readonly("ac_rank", &SaabFilterBank::ac_rank)
        .def_readonly("energies", &SaabFilterBank::energies)
        .def_readonly("ac_eigenvalues", &SaabFilterBank::ac_eigenvalues)
        .def_property_readonly("kernels",
                               [](const SaabFilterBank& b) {
                                   Array a({b.dim(), b.dim()});
                                   std::copy(b.kernels.begin(), b.kernels.end(), a.mutable_data());
                                   return a;
                               })
        .def("transform", [](const SaabFilterBank& b, const Array& x) {
            if (x.ndim() != 1) throw ShapeError("expected a 1-D patch");
            return transform(std::span(x.data(), static_cast<std::size_t>(x.size())), b);
        });

    m.def("fit_saab",
          [](const Array& patches, int size, int channels) { return fit_saab(matrix_from_array(patches), {size, channels}).bank; },
          py::arg("patches"), py::arg("size"), py::arg("channels") = 3);

    m.def("pixelhop", [](const Array& block, const SaabFilterBank& bank) {
        const Image img = image_from_array(block);
        if (img.height() != kBlockSize || img.width() != kBlockSize) throw ShapeError("expected a (16, 16, 3) block");
        const ResponseTensor t = apply(extract_block(img, 0, 0), bank);
        Array a({t.height, t.width, t.channels()});
        std::copy(t.values.begin(), t.values.end(), a.mutable_data());
        return a;
    });

    py::class_<BoostParams>(m, "BoostParams")
        .def(py::init<>())
        .def_readwrite("n_trees", &BoostParams::n_trees)
        .def_readwrite("learning_rate", &BoostParams::learning_rate)
        .def_readwrite("lam", &BoostParams::lambda)
        .def_readwrite("min_child_weight", &BoostParams::min_child_weight);

    py::class_<StumpEnsemble>(m, "StumpEnsemble")
        .def_readonly("base_score", &StumpEnsemble::base_score)
        .def_property_readonly("n_trees", [](const StumpEnsemble& e) { return e.trees.size(); })
        .def_property_readonly("param_count", [](const StumpEnsemble& e) { return param_count(e); })
        .def_property_readonly("trees",
                               [](const StumpEnsemble& e) {
                                   py::list out;
                                   for (const Stump& s : e.trees)
                                       out.append(py::make_tuple(s.feature, s.threshold, s.left_value, s.right_value));
                                   return out;
                               })
        .def("predict", [](const StumpEnsemble& e, const Array& X) { return predict_scores(e, matrix_from_array(X)); });

    m.def("fit_stumps",
          [](const Array& X, const std::vector<int>& y, const BoostParams& params) {
              return fit_stumps(matrix_from_array(X), y, params);
          },
          py::arg("X"), py::arg("y"), py::arg("params") = BoostParams{});

    py::class_<DetectorConfig>(m, "DetectorConfig")
        .def(py::init<>())
        .def_property(
            "hops", [](const DetectorConfig& c) { return hops_to_string(c.hops); },
            [](DetectorConfig& c, const std::string& s) { c.hops = parse_hops(s); })
        .def_property(
            "perturbation", [](const DetectorConfig& c) { return to_string(c.perturbation); },
            [](DetectorConfig& c, const std::string& s) { c.perturbation = parse_perturbation(s); })
        .def_readwrite("seed", &DetectorConfig::seed)
        .def_readwrite("max_channels_per_hop", &DetectorConfig::max_channels_per_hop)
        .def_readwrite("channel_grid", &DetectorConfig::channel_grid)
        .def_readwrite("retain_all_channels", &DetectorConfig::retain_all_channels)
        .def_readwrite("boost", &DetectorConfig::boost);

    py::class_<DetectorModel>(m, "Model")
        .def_property_readonly("selected",
                               [](const DetectorModel& model) {
                                   std::vector<std::string> out;
                                   for (const auto& id : model.selected) out.push_back(to_string(id));
                                   return out;
                               })
        .def_readonly("config", &DetectorModel::config)
        .def_property_readonly("tile_size", [](const DetectorModel& model) {
            return py::make_tuple(model.tile_height, model.tile_width);
        })
        .def("bank", [](const DetectorModel& model, const std::string& hop) {
            if (hop.size() != 1) throw ConfigError("hop must be one letter");
            return model.bank(parse_hop(hop[0]));
        })
        .def("predict",
             [](const DetectorModel& model, const Array& pixels) {
                 const Prediction p = predict_raw(make_tile(image_from_array(pixels), Label::Unknown, ""), model);
                 return py::make_tuple(std::string(to_string(p.label)), p.score);
             })
        .def("evaluate",
             [](const DetectorModel& model, const std::vector<Tile>& tiles, bool perturb) {
                 if (!perturb) return metrics_dict(evaluate(tiles, model));
                 std::vector<Tile> prepared;
                 for (const Tile& t : tiles) prepared.push_back(apply_perturbation(t, model.config.perturbation));
                 return metrics_dict(evaluate(prepared, model));
             },
             py::arg("tiles"), py::arg("perturb") = true)
        .def("size", [](const DetectorModel& model) { return size_dict(model_size_report(model)); })
        .def("heatmap",
             [](const DetectorModel& model, const Array& pixels, int stride, std::optional<std::string> channel) {
                 const Tile tile = apply_perturbation(make_tile(image_from_array(pixels), Label::Unknown, ""),
                                                      model.config.perturbation);
                 if (channel) return heatmap_array(channel_heatmap(tile, model, parse_channel_id(*channel), stride));
                 return heatmap_array(compute_heatmap(tile, model, stride));
             },
             py::arg("pixels"), py::arg("stride") = kDefaultHeatmapStride, py::arg("channel") = py::none())
        .def("to_json", &serialize_model)
        .def("save", [](const DetectorModel& model, const std::filesystem::path& p) { save_model(p, model); });

    m.def("load_model", &load_model, py::arg("path"));

    m.def("train",
          [](const DetectorConfig& config, std::vector<Tile> tiles) {
              TrainOutcome out;
              {
                  py::gil_scoped_release release;
                  out = train(config, std::move(tiles));
              }
              return py::make_tuple(std::move(out.model), std::move(out.split.test));
          },
          py::arg("config"), py::arg("tiles"),
          "Returns (model, test_tiles); the test tiles have already been perturbed.");
}
