#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "persuasion/baseline.hpp"
#include "persuasion/cli.hpp"
#include "persuasion/corpus.hpp"
#include "persuasion/error.hpp"
#include "persuasion/evaluate.hpp"
#include "persuasion/preprocess.hpp"
#include "persuasion/probability_table.hpp"
#include "persuasion/report.hpp"

namespace py = pybind11;
using namespace persuasion;

// ParagraphKey <-> (article_id, paragraph_id)
namespace pybind11::detail {
template <>
struct type_caster<ParagraphKey> {
  PYBIND11_TYPE_CASTER(ParagraphKey, const_name("tuple[str, int]"));

  bool load(handle src, bool) {
    if (!isinstance<tuple>(src)) return false;
    auto t = reinterpret_borrow<tuple>(src);
    if (t.size() != 2) return false;
    value.article_id = t[0].cast<std::string>();
    value.paragraph_id = t[1].cast<std::uint64_t>();
    return true;
  }
  static handle cast(const ParagraphKey& k, return_value_policy, handle) {
    return pybind11::make_tuple(k.article_id, k.paragraph_id).release();
  }
};
}  // namespace pybind11::detail

namespace {

ThresholdGrid make_grid(double start, double stop, double step) { return {start, stop, step}; }

py::dict curve_dict(const CalibrationCurve& c) {
  py::list points;
  for (const auto& p : c.points) points.append(py::make_tuple(p.threshold, p.f1_micro, p.f1_macro));
  py::dict d;
  d["points"] = points;
  d["best_threshold"] = c.best_threshold;
  d["best_f1_micro"] = c.best_f1_micro;
  return d;
}

py::dict summary_dict(const ScoreSummary& s, const TechniqueVocabulary& v) {
  py::dict per_class;
  for (std::size_t c = 0; c < v.size(); ++c) {
    const auto& t = s.per_class[c];
    per_class[py::str(v.name(c))] = py::make_tuple(t.tp, t.fp, t.fn);
  }
  py::dict d;
  d["f1_micro"] = s.f1_micro;
  d["f1_macro"] = s.f1_macro;
  d["tp"] = s.total.tp;
  d["fp"] = s.total.fp;
  d["fn"] = s.total.fn;
  d["per_class"] = per_class;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Persuasion-technique detection: scoring, calibration, baseline classifier";

  auto base = py::register_exception<Error>(m, "PersuasionError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());
  py::register_exception<VocabularyMismatch>(m, "VocabularyMismatch", base.ptr());

  py::class_<TechniqueVocabulary>(m, "TechniqueVocabulary")
      .def(py::init<std::vector<std::string>>(), py::arg("names"))
      .def_property_readonly("names", &TechniqueVocabulary::names)
      .def("index_of", &TechniqueVocabulary::index_of)
      .def("__len__", &TechniqueVocabulary::size)
      .def("__contains__", &TechniqueVocabulary::contains)
      .def("__eq__", [](const TechniqueVocabulary& a, const TechniqueVocabulary& b) { return a == b; });
  m.def("load_vocabulary", &load_vocabulary, py::arg("path"));

  py::class_<Corpus>(m, "Corpus")
      .def(py::init([](const TechniqueVocabulary& v,
                       const std::vector<std::tuple<ParagraphKey, std::string, std::string>>& rows,
                       std::optional<GoldLabels> gold) {
             std::vector<Paragraph> ps;
             for (const auto& [key, lang, text] : rows) ps.push_back({key, lang, text});
             return Corpus(v, std::move(ps), std::move(gold));
           }),
           py::arg("vocabulary"), py::arg("paragraphs"), py::arg("gold") = py::none(),
           "paragraphs: list of ((article_id, paragraph_id), language, text)")
      .def_property_readonly("vocabulary", &Corpus::vocabulary)
      .def_property_readonly("paragraphs",
                             [](const Corpus& c) {
                               py::list out;
                               for (const auto& p : c.paragraphs()) out.append(py::make_tuple(p.key, p.language, p.text));
                               return out;
                             })
      .def_property_readonly("gold", [](const Corpus& c) { return c.gold(); })
      .def("languages", &Corpus::languages)
      .def("with_gold", &Corpus::with_gold, py::arg("gold"))
      .def("__len__", &Corpus::size);
  m.def("load_corpus", &load_corpus, py::arg("template_path"), py::arg("language"), py::arg("vocabulary"));
  m.def("load_gold", &load_gold, py::arg("path"), py::arg("corpus"));
  m.def("read_label_file", &read_label_file, py::arg("path"), py::arg("vocabulary"));
  m.def("emit_submission", &emit_submission, py::arg("predictions"), py::arg("vocabulary"), py::arg("path"));
  m.def("split_by_language", &split_by_language, py::arg("corpus"), py::arg("holdout"));

  m.def("normalize_ws_punct", &normalize_ws_punct, py::arg("text"));
  m.def("replace_entities", &replace_entities, py::arg("text"));
  m.def(
      "preprocess", [](std::string_view text, std::string_view flags) {
        return preprocess(text, parse_preprocess_flags(flags));
      },
      py::arg("text"), py::arg("flags") = "ws_punct,entities");

  m.def("fnv1a64", &fnv1a64, py::arg("data"));
  m.def(
      "extract_ngrams",
      [](std::string_view text, std::size_t ngram_min, std::size_t ngram_max, std::size_t max_chars) {
        FeaturizerConfig f;
        f.ngram_min = ngram_min;
        f.ngram_max = ngram_max;
        f.max_chars = max_chars;
        f.validate();
        return extract_ngrams(text, f);
      },
      py::arg("text"), py::arg("ngram_min") = 2, py::arg("ngram_max") = 4, py::arg("max_chars") = 2000);

  py::class_<ProbabilityTable>(m, "ProbabilityTable")
      .def(py::init([](const TechniqueVocabulary& v,
                       const std::vector<std::tuple<ParagraphKey, std::string, std::vector<double>>>& rows) {
             std::vector<ProbabilityTable::Row> out;
             for (const auto& [key, lang, probs] : rows) out.push_back({key, lang, probs});
             return ProbabilityTable(v, std::move(out));
           }),
           py::arg("vocabulary"), py::arg("rows"), "rows: list of ((article_id, paragraph_id), language, probs)")
      .def_property_readonly("vocabulary", &ProbabilityTable::vocabulary)
      .def_property_readonly("rows",
                             [](const ProbabilityTable& t) {
                               py::list out;
                               for (const auto& r : t.rows()) out.append(py::make_tuple(r.key, r.language, r.probs));
                               return out;
                             })
      .def("restrict_to_language", &ProbabilityTable::restrict_to_language, py::arg("language"))
      .def("save", [](const ProbabilityTable& t, const std::filesystem::path& p) { save_probability_table(t, p); })
      .def("__len__", &ProbabilityTable::size);
  m.def("load_probability_table", &load_probability_table, py::arg("path"), py::arg("vocabulary"));

  m.def("apply_threshold", &apply_threshold, py::arg("table"), py::arg("theta"));
  m.def("f1_micro", &f1_micro, py::arg("pred"), py::arg("gold"), py::arg("vocabulary"));
  m.def("f1_macro", &f1_macro, py::arg("pred"), py::arg("gold"), py::arg("vocabulary"));
  m.def("ensemble_union", &ensemble_union, py::arg("a"), py::arg("b"), py::arg("vocabulary"));
  m.def(
      "score",
      [](const LabelMap& pred, const LabelMap& gold, const TechniqueVocabulary& v, const LanguageMap& languages) {
        const auto r = score(pred, gold, v, languages);
        auto d = summary_dict(r.global, v);
        py::dict langs;
        for (const auto& [lang, s] : r.per_language) langs[py::str(lang)] = summary_dict(s, v);
        d["per_language"] = langs;
        return d;
      },
      py::arg("pred"), py::arg("gold"), py::arg("vocabulary"), py::arg("languages") = LanguageMap{});
  m.def(
      "calibrate_threshold",
      [](const ProbabilityTable& t, const GoldLabels& gold, double start, double stop, double step) {
        return curve_dict(calibrate_threshold(t, gold, make_grid(start, stop, step)));
      },
      py::arg("table"), py::arg("gold"), py::arg("start") = 0.05, py::arg("stop") = 0.95, py::arg("step") = 0.01);
  m.def(
      "calibrate_ensemble",
      [](const std::vector<ProbabilityTable>& tables, const GoldLabels& gold, double start, double stop,
         double step) { return curve_dict(calibrate_ensemble(tables, gold, make_grid(start, stop, step))); },
      py::arg("tables"), py::arg("gold"), py::arg("start") = 0.05, py::arg("stop") = 0.95, py::arg("step") = 0.01);

  py::class_<BaselineModel>(m, "BaselineModel")
      .def_property_readonly("vocabulary", [](const BaselineModel& b) { return b.vocabulary; })
      .def_readonly("initial_loss", &BaselineModel::initial_loss)
      .def_readonly("epoch_losses", &BaselineModel::epoch_losses)
      .def("predict", &predict_probs, py::arg("corpus"))
      .def("save", [](const BaselineModel& b, const std::filesystem::path& p) { save_model(b, p); });
  m.def(
      "train",
      [](const Corpus& corpus, std::string_view preprocess, std::size_t epochs, double learning_rate,
         std::size_t batch_size, std::uint64_t seed, std::size_t ngram_min, std::size_t ngram_max,
         std::size_t hash_dim, std::size_t max_chars) {
        FeaturizerConfig f{ngram_min, ngram_max, hash_dim, max_chars};
        TrainerConfig t{epochs, learning_rate, batch_size, seed};
        const auto flags = parse_preprocess_flags(preprocess);
        py::gil_scoped_release release;
        return train(corpus, f, flags, t);
      },
      py::arg("corpus"), py::arg("preprocess") = "none", py::arg("epochs") = 20, py::arg("learning_rate") = 0.1,
      py::arg("batch_size") = 16, py::arg("seed") = 42, py::arg("ngram_min") = 2, py::arg("ngram_max") = 4,
      py::arg("hash_dim") = std::size_t{1} << 18, py::arg("max_chars") = 2000);
  m.def("load_model", &load_model, py::arg("path"));

  m.def(
      "label_distribution",
      [](const Corpus& corpus) {
        std::ostringstream s;
        write_distribution_csv(s, label_distribution(corpus));
        return s.str();
      },
      py::arg("corpus"), "Distribution CSV text");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the persuade command line; returns (exit_code, stdout, stderr).");
}
