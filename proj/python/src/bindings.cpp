#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "adha/cost_model.hpp"
#include "adha/io.hpp"
#include "adha/ods.hpp"
#include "adha/oracle.hpp"
#include "adha/pdl.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

const adha::Section& section_of(const adha::Program& p, const std::string& id) {
  const adha::Section* s = p.find_section(id);
  if (s == nullptr) throw adha::InputError("unknown section '" + id + "'");
  return *s;
}

std::string plan_json(const adha::Program& p, const adha::Architecture& a,
                      const adha::TuningProfile* profile) {
  const adha::Plan plan = adha::shortest_plan(adha::build_run_graph(p, a, profile));
  return adha::io::to_json(plan).dump();
}

}  // namespace

PYBIND11_MODULE(_adha, m) {
  m.doc() = "Data layout selection (ODS) and program layout/device planning (PDL)";

  py::register_exception<adha::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<adha::io::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<adha::Layout>(m, "Layout")
      .def_static("parse", &adha::Layout::parse, "text"_a)
      .def_property_readonly("clusters", &adha::Layout::clusters)
      .def("__str__", &adha::Layout::str)
      .def("__repr__", [](const adha::Layout& l) { return "Layout('" + l.str() + "')"; })
      .def("__eq__", [](const adha::Layout& a, const adha::Layout& b) { return a == b; });

  py::class_<adha::Program>(m, "Program")
      .def_readonly("name", &adha::Program::name)
      .def_readonly("record_count", &adha::Program::record_count)
      .def_readonly("order", &adha::Program::order)
      .def_property_readonly("field_names", [](const adha::Program& p) {
        std::vector<std::string> out;
        for (const auto& f : p.fields) out.push_back(f.name);
        return out;
      });
  py::class_<adha::Architecture>(m, "Architecture")
      .def_property_readonly("device_names", [](const adha::Architecture& a) {
        std::vector<std::string> out;
        for (const auto& d : a.devices) out.push_back(d.name);
        return out;
      });
  py::class_<adha::TuningProfile>(m, "TuningProfile")
      .def(py::init<>())
      .def("add", &adha::TuningProfile::add, "section"_a, "device"_a, "layout"_a, "time_ns"_a)
      .def("find", &adha::TuningProfile::find, "section"_a, "device"_a, "layout"_a)
      .def("__len__", &adha::TuningProfile::size);

  m.def("load_program", [](const std::string& path) { return adha::io::load_program(path); });
  m.def("load_architecture",
        [](const std::string& path) { return adha::io::load_architecture(path); });
  m.def("load_profile", [](const std::string& path) { return adha::io::load_profile(path); });
  m.def("program_from_json", [](const std::string& text) {
    return adha::io::program_from_json(nlohmann::json::parse(text));
  });
  m.def("architecture_from_json", [](const std::string& text) {
    return adha::io::architecture_from_json(nlohmann::json::parse(text));
  });
  m.def("profile_from_json", [](const std::string& text) {
    return adha::io::profile_from_json(nlohmann::json::parse(text));
  });

  m.def("validate_program",
        [](const adha::Program& p, const adha::Architecture& a) {
          std::vector<std::pair<std::string, std::string>> out;
          for (const auto& d : adha::validate_program(p, a)) out.emplace_back(d.subject, d.message);
          return out;
        },
        "program"_a, "arch"_a);

  m.def("ods",
        [](const adha::Program& p, const adha::Architecture& a, const std::string& section,
           const std::string& device) {
          return adha::ods(section_of(p, section), a.device(device), p);
        },
        "program"_a, "arch"_a, "section"_a, "device"_a,
        "Greedy affinity-clustered layout of one section on one device.");

  m.def("affinity_edges",
        [](const adha::Program& p, const adha::Architecture& a, const std::string& section,
           const std::string& device) {
          std::vector<std::tuple<std::string, std::string, double>> out;
          const auto g = adha::build_affinity_graph(section_of(p, section), a.device(device),
                                                    p.fields);
          for (const auto& e : g.edges()) out.emplace_back(e.a, e.b, e.weight);
          return out;
        },
        "program"_a, "arch"_a, "section"_a, "device"_a);

  m.def("exec_cost",
        [](const adha::Program& p, const adha::Architecture& a, const std::string& section,
           const adha::Layout& layout, const std::string& device,
           const adha::TuningProfile* profile) {
          const auto c = adha::exec_cost(section_of(p, section), layout, a.device(device), p,
                                         profile);
          return py::dict("memory_ns"_a = c.memory_ns, "compute_ns"_a = c.compute_ns,
                          "total_ns"_a = c.total_ns,
                          "source"_a = c.source == adha::CostSource::model ? "model" : "profile");
        },
        "program"_a, "arch"_a, "section"_a, "layout"_a, "device"_a,
        "profile"_a = py::none());

  m.def("plan_json",
        [](const adha::Program& p, const adha::Architecture& a,
           const adha::TuningProfile* profile) { return plan_json(p, a, profile); },
        "program"_a, "arch"_a, "profile"_a = py::none());

  m.def("run_nodes",
        [](const adha::Program& p, const adha::Architecture& a,
           const adha::TuningProfile* profile) {
          py::list out;
          const adha::RunGraph graph = adha::build_run_graph(p, a, profile);
          for (const auto& n : graph.nodes()) {
            py::dict node;
            node["begin"] = n.begin;
            node["end"] = n.end;
            node["device"] = n.device;
            node["layout"] = n.layout.str();
            node["sections"] = n.sections;
            node["exec_ns"] = n.exec_ns;
            out.append(std::move(node));
          }
          return out;
        },
        "program"_a, "arch"_a, "profile"_a = py::none(),
        "Every (contiguous run, device) candidate with its merged layout and cost.");

  m.def("explain",
        [](const adha::Program& p, const adha::Architecture& a,
           const adha::TuningProfile* profile) {
          const auto plan = adha::shortest_plan(adha::build_run_graph(p, a, profile));
          return adha::explain_plan(plan, p);
        },
        "program"_a, "arch"_a, "profile"_a = py::none());

  m.def("brute_force_ods",
        [](const adha::Program& p, const adha::Architecture& a, const std::string& section,
           const std::string& device) {
          const auto best =
              adha::oracle::brute_force_ods(section_of(p, section), a.device(device), p);
          return py::make_tuple(best.layout, best.cost_ns);
        },
        "program"_a, "arch"_a, "section"_a, "device"_a);

  m.def("simulate_misses",
        [](const adha::Program& p, const std::string& section, const adha::Layout& layout,
           std::uint32_t line_bytes, std::uint32_t num_sets, std::uint32_t ways,
           std::uint64_t iters, std::uint64_t seed) {
          return adha::oracle::simulate_misses(section_of(p, section), layout,
                                               {line_bytes, num_sets, ways}, p, iters, seed);
        },
        "program"_a, "section"_a, "layout"_a, "line_bytes"_a = 64, "num_sets"_a = 64,
        "ways"_a = 8, "iters"_a = 4096, "seed"_a = 0);

#ifdef ADHA_VERSION
  m.attr("__version__") = ADHA_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
