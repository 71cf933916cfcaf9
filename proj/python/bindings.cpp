#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlchirp/bench.hpp"
#include "nlchirp/channel.hpp"
#include "nlchirp/chirp.hpp"
#include "nlchirp/collision.hpp"
#include "nlchirp/framing.hpp"
#include "nlchirp/modem.hpp"
#include "nlchirp/sync.hpp"

namespace py = pybind11;
using namespace nlchirp;

PYBIND11_MODULE(_nlchirp, m) {
    m.doc() = "non-linear chirp modem core";

    py::class_<ChirpPolynomial>(m, "ChirpPolynomial")
        .def(py::init<>())
        .def_readwrite("family_id", &ChirpPolynomial::family_id)
        .def_readwrite("label", &ChirpPolynomial::label)
        .def_readwrite("coeffs", &ChirpPolynomial::coeffs)
        .def("eval", &ChirpPolynomial::eval)
        .def("validate", &ChirpPolynomial::validate);

    py::class_<ChirpProfile>(m, "ChirpProfile")
        .def(py::init<ChirpPolynomial, int, double, int>(), py::arg("poly"),
             py::arg("sf"), py::arg("bw"), py::arg("osr") = 1)
        .def_readonly("sf", &ChirpProfile::sf)
        .def_readonly("bw", &ChirpProfile::bw)
        .def_readonly("osr", &ChirpProfile::osr)
        .def_property_readonly("n_bins", &ChirpProfile::n_bins)
        .def_property_readonly("n_samples", &ChirpProfile::n_samples)
        .def_property_readonly("sample_rate", &ChirpProfile::sample_rate);

    py::class_<Waveform>(m, "Waveform")
        .def(py::init<>())
        .def_readwrite("samples", &Waveform::samples)
        .def_readwrite("sample_rate", &Waveform::sample_rate)
        .def("energy", &Waveform::energy)
        .def("__len__", [](const Waveform& w) { return w.size(); });

    py::class_<SyncEstimate>(m, "SyncEstimate")
        .def_readonly("sto_samples", &SyncEstimate::sto_samples)
        .def_readonly("cfo_hz", &SyncEstimate::cfo_hz)
        .def_readonly("confidence", &SyncEstimate::confidence)
        .def_readonly("low_confidence", &SyncEstimate::low_confidence);

    py::class_<DecodedPacket>(m, "DecodedPacket")
        .def_readonly("start_offset", &DecodedPacket::start_offset)
        .def_readonly("sync", &DecodedPacket::sync)
        .def_readonly("family", &DecodedPacket::family)
        .def_readonly("payload_len", &DecodedPacket::payload_len)
        .def_readonly("symbols", &DecodedPacket::symbols)
        .def_readonly("per_symbol_scatter", &DecodedPacket::per_symbol_scatter);

    py::class_<ProfileSet>(m, "ProfileSet")
        .def(py::init<const std::vector<ChirpPolynomial>&, int, double, int>(),
             py::arg("families"), py::arg("sf"), py::arg("bw"), py::arg("osr") = 1);

    m.def("builtin_families", &builtin_families);
    m.def("builtin_family", &builtin_family);
    m.def("map_coefficients", &map_coefficients);
    m.def("instantaneous_frequency", &instantaneous_frequency);
    m.def("synth_symbol", &synth_symbol);
    m.def("base_downchirp", &base_downchirp);

    m.def("dechirp_magnitudes", [](const Waveform& w, const ChirpProfile& p) {
        return dechirp(w.samples, p).magnitudes;
    });
    m.def("demodulate", [](const Waveform& w, const ChirpProfile& p) {
        return decide_symbol(dechirp(w.samples, p));
    });

    m.def("build_frame",
          [](const ProfileSet& profiles, int family, const std::vector<std::uint32_t>& payload) {
              FrameSpec spec{family, payload.size()};
              return build_frame(profiles, spec, payload);
          });
    m.def("parse_frame", &parse_frame);
    m.def("decode_all", &decode_all);

    m.def("awgn", &awgn);
    m.def("save_iq", &save_iq);
    m.def("load_iq", &load_iq, py::arg("path"), py::arg("sample_rate") = 0.0);

    m.def("compute_ser", &compute_ser);
    m.def("compute_pdr", &compute_pdr);
    m.def("compute_throughput", &compute_throughput);

    py::register_exception<FrameNotFoundError>(m, "FrameNotFoundError");
    py::register_exception<SyncAmbiguityError>(m, "SyncAmbiguityError");
}
