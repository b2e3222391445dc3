#include <limits>
#include <optional>
#include <string>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "lensless/autocorr.hpp"
#include "lensless/dataset.hpp"
#include "lensless/image_io.hpp"
#include "lensless/metrics.hpp"
#include "lensless/sensor.hpp"
#include "lensless/simulate.hpp"
#include "lensless/solvers.hpp"

namespace py = pybind11;
using namespace lensless;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// numpy arrays are (H, W) or (H, W, C); ImageTensor is planar.
ImageTensor to_image(const Array& a) {
    if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("expected an (H, W) or (H, W, C) array");
    const auto h = static_cast<std::size_t>(a.shape(0));
    const auto w = static_cast<std::size_t>(a.shape(1));
    const std::size_t c = a.ndim() == 3 ? static_cast<std::size_t>(a.shape(2)) : 1;
    ImageTensor img(h, w, c);
    const double* src = a.data();
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
            for (std::size_t ch = 0; ch < c; ++ch) img.at(r, col, ch) = src[(r * w + col) * c + ch];
        }
    }
    return img;
}

Array to_array(const ImageTensor& img) {
    const std::size_t h = img.height(), w = img.width(), c = img.channels();
    Array out = c == 1 ? Array({h, w}) : Array({h, w, c});
    double* dst = out.mutable_data();
    for (std::size_t r = 0; r < h; ++r) {
        for (std::size_t col = 0; col < w; ++col) {
            for (std::size_t ch = 0; ch < c; ++ch) dst[(r * w + col) * c + ch] = img.at(r, col, ch);
        }
    }
    return out;
}

py::dict report_dict(const MetricReport& r) {
    py::dict d;
    d["mse"] = r.mse;
    d["psnr_db"] = r.psnr_db ? py::cast(*r.psnr_db) : py::none();
    d["ssim"] = r.ssim;
    for (const auto& [k, v] : r.extra) d[py::str(k)] = v;
    return d;
}

std::optional<Region> to_region(const std::optional<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>& t) {
    if (!t) return std::nullopt;
    const auto [top, left, h, w] = *t;
    return Region{top, left, h, w};
}

SolverConfig make_config(const std::string& algo, int n_iter, std::optional<double> step_size,
                         std::optional<double> tv_weight, double mu1, double mu2, double mu3, double l1_weight,
                         std::optional<double> momentum, bool nonneg, const std::string& fft) {
    SolverConfig c;
    c.algorithm = parse_algorithm(algo);
    c.n_iter = n_iter;
    c.step_size = step_size;
    c.tv_weight = tv_weight;
    c.admm = {mu1, mu2, mu3};
    c.l1_weight = l1_weight;
    c.momentum = momentum;
    c.nonneg = nonneg;
    if (fft == "real") {
        c.fft_path = FftPath::real;
    } else if (fft == "complex") {
        c.fft_path = FftPath::complex;
    } else {
        throw py::value_error("fft must be 'real' or 'complex'");
    }
    validate(c);
    return c;
}

FftPath parse_fft(const std::string& fft) {
    if (fft == "real") return FftPath::real;
    if (fft == "complex") return FftPath::complex;
    throw py::value_error("fft must be 'real' or 'complex'");
}

// Python-side owner of a Reconstruction.
class PyReconstruction {
public:
    PyReconstruction(const Psf& psf, const SolverConfig& config) : rec_(make_reconstruction(psf, config)) {}

    void set_data(const Array& y) { rec_->set_data(to_image(y)); }
    Array apply(std::optional<int> n_iter) {
        ImageTensor out = [&] {
            py::gil_scoped_release release;
            return rec_->apply(n_iter.value_or(rec_->config().n_iter));
        }();
        return to_array(out);
    }
    void step() { rec_->step(); }
    Array iterate() const { return to_array(rec_->iterate()); }
    int iteration() const { return rec_->iteration(); }
    std::vector<double> objective_history() const { return rec_->objective_history(); }
    double step_size() const { return rec_->step_size(); }
    std::string algorithm() const { return to_string(rec_->algorithm()); }

private:
    std::unique_ptr<Reconstruction> rec_;
};

}  // namespace

PYBIND11_MODULE(_lensless, m) {
    m.doc() = "Lensless camera reconstruction: FFT convolution operator, solvers, metrics and datasets";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const std::domain_error& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        }
    });

    m.def("load_image", [](const std::filesystem::path& p, bool as_float) { return to_array(load_image(p, as_float)); },
          py::arg("path"), py::arg("as_float") = true);
    m.def("save_image", [](const Array& a, const std::filesystem::path& p, int depth) { save_image(to_image(a), p, depth); },
          py::arg("image"), py::arg("path"), py::arg("bit_depth") = 8);
    m.def("downsample", [](const Array& a, std::size_t f) { return to_array(downsample(to_image(a), f)); },
          py::arg("image"), py::arg("factor"));
    m.def("rgb_to_gray", [](const Array& a) { return to_array(rgb_to_gray(to_image(a))); }, py::arg("image"));

    m.def(
        "demosaic",
        [](const Array& raw, const std::string& pattern, int bit_depth, double black_level, double red_gain,
           double blue_gain, bool gray) {
            if (raw.ndim() != 2) throw py::value_error("raw frame must be 2-D");
            BayerFrame f;
            f.height = static_cast<std::size_t>(raw.shape(0));
            f.width = static_cast<std::size_t>(raw.shape(1));
            f.pattern = parse_bayer_pattern(pattern);
            f.bit_depth = bit_depth;
            f.black_level = black_level;
            f.wb = {red_gain, blue_gain};
            f.data.assign(raw.data(), raw.data() + raw.size());
            return to_array(gray ? bayer_to_gray(f) : demosaic(f));
        },
        py::arg("raw"), py::arg("pattern"), py::arg("bit_depth"), py::arg("black_level"), py::arg("red_gain") = 1.0,
        py::arg("blue_gain") = 1.0, py::arg("gray") = false);

    py::class_<Psf>(m, "Psf")
        .def_property_readonly("image", [](const Psf& p) { return to_array(p.image); })
        .def_readonly("background_floor", &Psf::background_floor)
        .def_readonly("normalization", &Psf::normalization);
    m.def("calibrate_psf", [](const Array& raw, double floor) { return calibrate_psf(to_image(raw), floor); },
          py::arg("raw"), py::arg("floor_percentile") = 0.0);

    py::class_<ConvolutionOperator, std::shared_ptr<ConvolutionOperator>>(m, "ConvolutionOperator")
        .def(py::init([](const Psf& psf, const std::string& fft) {
                 return std::make_shared<ConvolutionOperator>(psf, parse_fft(fft));
             }),
             py::arg("psf"), py::arg("fft") = "real")
        .def("apply", [](const ConvolutionOperator& op, const Array& x) { return to_array(op.apply(to_image(x))); })
        .def("adjoint", [](const ConvolutionOperator& op, const Array& y) { return to_array(op.adjoint(to_image(y))); })
        .def_property_readonly("lipschitz", &ConvolutionOperator::lipschitz)
        .def_property_readonly("padded_shape",
                               [](const ConvolutionOperator& op) { return py::make_tuple(op.padded_rows(), op.padded_cols()); });

    py::class_<PyReconstruction>(m, "Reconstruction")
        .def(py::init([](const Psf& psf, const std::string& algo, int n_iter, std::optional<double> step_size,
                         std::optional<double> tv_weight, double mu1, double mu2, double mu3, double l1_weight,
                         std::optional<double> momentum, bool nonneg, const std::string& fft) {
                 return PyReconstruction(psf, make_config(algo, n_iter, step_size, tv_weight, mu1, mu2, mu3,
                                                          l1_weight, momentum, nonneg, fft));
             }),
             py::arg("psf"), py::arg("algo") = "admm", py::arg("n_iter") = 100, py::arg("step_size") = py::none(),
             py::arg("tv_weight") = py::none(), py::arg("mu1") = AdmmPenalties{}.mu1,
             py::arg("mu2") = AdmmPenalties{}.mu2, py::arg("mu3") = AdmmPenalties{}.mu3, py::arg("l1_weight") = 0.0,
             py::arg("momentum") = py::none(), py::arg("nonneg") = true, py::arg("fft") = "real")
        .def("set_data", &PyReconstruction::set_data, py::arg("measurement"))
        .def("apply", &PyReconstruction::apply, py::arg("n_iter") = py::none())
        .def("step", &PyReconstruction::step)
        .def_property_readonly("iterate", &PyReconstruction::iterate)
        .def_property_readonly("iteration", &PyReconstruction::iteration)
        .def_property_readonly("objective_history", &PyReconstruction::objective_history)
        .def_property_readonly("step_size", &PyReconstruction::step_size)
        .def_property_readonly("algorithm", &PyReconstruction::algorithm);

    m.def("mse", [](const Array& a, const Array& b) { return mse(to_image(a), to_image(b)); });
    m.def("psnr", [](const Array& a, const Array& b, double peak) { return psnr(to_image(a), to_image(b), peak); },
          py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);
    m.def("ssim", [](const Array& a, const Array& b, double peak) { return ssim(to_image(a), to_image(b), peak); },
          py::arg("a"), py::arg("b"), py::arg("peak") = 1.0);
    m.def(
        "compare",
        [](const Array& rec, const Array& ref,
           const std::optional<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>& region) {
            return report_dict(compare(to_image(rec), to_image(ref), to_region(region)));
        },
        py::arg("reconstruction"), py::arg("reference"), py::arg("region") = py::none());

    m.def("autocorr2d", [](const Array& a) { return to_array(autocorr2d(to_image(a))); }, py::arg("image"));
    m.def(
        "psf_report",
        [](const Psf& psf) {
            const PsfReport r = psf_report(psf);
            py::list channels;
            for (const auto& c : r.channels) {
                py::dict d;
                d["autocorr_peak"] = c.autocorr_peak;
                d["max_sidelobe"] = c.max_sidelobe;
                d["sidelobe_lag"] = py::make_tuple(c.sidelobe_row_lag, c.sidelobe_col_lag);
                d["peak_to_sidelobe"] = c.peak_to_sidelobe ? py::cast(*c.peak_to_sidelobe) : py::none();
                d["sidelobe_to_peak"] = c.sidelobe_to_peak;
                d["conditioning"] = c.conditioning;
                d["support_pixels"] = c.support_pixels;
                d["support_fraction"] = c.support_fraction;
                channels.append(d);
            }
            py::dict out;
            out["height"] = r.height;
            out["width"] = r.width;
            out["channels"] = channels;
            return out;
        },
        py::arg("psf"));

    m.def(
        "simulate_measurement",
        [](const Array& scene, const Psf& psf, double snr_db, std::uint64_t seed, bool clip) {
            return to_array(simulate_measurement(to_image(scene), psf, {snr_db, seed, clip}));
        },
        py::arg("scene"), py::arg("psf"), py::arg("snr_db") = std::numeric_limits<double>::infinity(),
        py::arg("seed") = 0, py::arg("clip") = true);
    m.def("synthetic_scene",
          [](std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) { return to_array(synthetic_scene(h, w, c, seed)); },
          py::arg("height"), py::arg("width"), py::arg("channels") = 1, py::arg("seed") = 0);
    m.def("synthetic_psf",
          [](std::size_t h, std::size_t w, std::size_t c, std::uint64_t seed) { return to_array(synthetic_psf(h, w, c, seed)); },
          py::arg("height"), py::arg("width"), py::arg("channels") = 1, py::arg("seed") = 0);
    m.def(
        "write_synthetic_dataset",
        [](const std::filesystem::path& root, std::size_t pairs, std::size_t h, std::size_t w, std::size_t c,
           double snr_db, std::uint64_t seed) { write_synthetic_dataset(root, {pairs, h, w, c, snr_db, seed}); },
        py::arg("root"), py::arg("pairs") = 10, py::arg("height") = 64, py::arg("width") = 64, py::arg("channels") = 1,
        py::arg("snr_db") = 40.0, py::arg("seed") = 0);

    m.def(
        "evaluate_dataset",
        [](const std::filesystem::path& root, const std::optional<std::filesystem::path>& manifest,
           const std::string& algo, int n_iter, double mu1, double mu2, double mu3, std::optional<double> tv_weight,
           bool gray, std::optional<std::size_t> downsample, unsigned jobs,
           const std::optional<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>& region) {
            EvaluationOptions o;
            o.solver = make_config(algo, n_iter, std::nullopt, tv_weight, mu1, mu2, mu3, 0.0, std::nullopt, true,
                                   "real");
            o.gray = gray;
            o.downsample = downsample;
            o.jobs = jobs;
            o.region = to_region(region);
            const PairedDataset ds = load_dataset(root, manifest);
            DatasetEvaluation ev;
            {
                py::gil_scoped_release release;
                ev = evaluate_dataset(ds, o);
            }
            py::list files;
            for (const auto& f : ev.files) {
                py::dict d = f.report ? report_dict(*f.report) : py::dict();
                d["name"] = f.name;
                if (!f.report) d["error"] = f.error;
                files.append(d);
            }
            py::dict out;
            out["files"] = files;
            out["aggregate"] = report_dict(ev.aggregate);
            out["succeeded"] = ev.succeeded;
            out["failed"] = ev.failed;
            return out;
        },
        py::arg("root"), py::arg("manifest") = py::none(), py::arg("algo") = "admm", py::arg("n_iter") = 100,
        py::arg("mu1") = AdmmPenalties{}.mu1, py::arg("mu2") = AdmmPenalties{}.mu2,
        py::arg("mu3") = AdmmPenalties{}.mu3, py::arg("tv_weight") = py::none(), py::arg("gray") = false,
        py::arg("downsample") = py::none(), py::arg("jobs") = 1, py::arg("region") = py::none());

    m.attr("ALGORITHMS") = py::make_tuple("gd", "nesterov", "fista", "admm", "apgd");
}
