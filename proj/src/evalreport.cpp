#include "frogtoad/evalreport.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace frogtoad::evalreport {

namespace {

using nlohmann::json;

std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::string format_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

// Sweep-relative checkpoint ids look like "cfg000/checkpoint-...".
std::string config_prefix(const std::string& checkpoint_id) {
    const auto slash = checkpoint_id.find('/');
    return slash == std::string::npos ? checkpoint_id : checkpoint_id.substr(0, slash);
}

}  // namespace

EvalResult evaluate(const neural::Network& net, const dataset::Dataset& test_set) {
    neural::check_network(net);
    if (test_set.rows.empty()) throw std::invalid_argument("test split is empty");

    EvalResult result;
    std::vector<double> input(static_cast<std::size_t>(neural::kInputDim));
    for (std::size_t r = 0; r < test_set.rows.size(); ++r) {
        const auto& row = test_set.rows[r];
        if (row.label >= 4) {
            throw std::invalid_argument("test split row " + std::to_string(r) + " has label " +
                                        std::to_string(row.label));
        }
        for (int i = 0; i < neural::kInputDim; ++i) {
            input[static_cast<std::size_t>(i)] = row.features[static_cast<std::size_t>(i)];
        }
        const auto fr = neural::forward(net, input);
        int pred = 0;
        for (int c = 1; c < 4; ++c) {
            // Strict comparison keeps ties on the lowest action index.
            if (fr.probs[static_cast<std::size_t>(c)] > fr.probs[static_cast<std::size_t>(pred)]) {
                pred = c;
            }
        }
        ++result.confusion[static_cast<std::size_t>(pred)][static_cast<std::size_t>(row.label)];
    }

    result.total = static_cast<long long>(test_set.rows.size());
    long long correct = 0;
    for (int c = 0; c < 4; ++c) {
        correct += result.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(result.total);

    for (int c = 0; c < 4; ++c) {
        long long predicted = 0;
        long long actual = 0;
        for (int o = 0; o < 4; ++o) {
            predicted += result.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(o)];
            actual += result.confusion[static_cast<std::size_t>(o)][static_cast<std::size_t>(c)];
        }
        const long long diag =
            result.confusion[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        result.precision[static_cast<std::size_t>(c)] =
            predicted == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(predicted);
        result.recall[static_cast<std::size_t>(c)] =
            actual == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(actual);
    }
    return result;
}

void write_eval_json(const std::filesystem::path& path, const EvalResult& result) {
    json conf = json::array();
    for (const auto& row : result.confusion) {
        conf.push_back(std::vector<long long>(row.begin(), row.end()));
    }
    const json doc{{"schema_version", 1},
                   {"kind", "eval_result"},
                   {"total", result.total},
                   {"accuracy", result.accuracy},
                   {"confusion", conf},
                   {"precision", std::vector<double>(result.precision.begin(), result.precision.end())},
                   {"recall", std::vector<double>(result.recall.begin(), result.recall.end())}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

EvalResult read_eval_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": not valid JSON: " + e.what());
    }
    try {
        if (doc.at("kind").get<std::string>() != "eval_result" ||
            doc.at("schema_version").get<int>() != 1) {
            throw std::runtime_error(path.string() + ": not an eval_result document");
        }
        EvalResult result;
        result.total = doc.at("total").get<long long>();
        result.accuracy = doc.at("accuracy").get<double>();
        const auto conf = doc.at("confusion").get<std::vector<std::vector<long long>>>();
        const auto prec = doc.at("precision").get<std::vector<double>>();
        const auto rec = doc.at("recall").get<std::vector<double>>();
        if (conf.size() != 4 || prec.size() != 4 || rec.size() != 4) {
            throw std::runtime_error(path.string() + ": matrices must be 4x4/4-wide");
        }
        for (int i = 0; i < 4; ++i) {
            if (conf[static_cast<std::size_t>(i)].size() != 4) {
                throw std::runtime_error(path.string() + ": matrices must be 4x4/4-wide");
            }
            for (int j = 0; j < 4; ++j) {
                result.confusion[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    conf[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            result.precision[static_cast<std::size_t>(i)] = prec[static_cast<std::size_t>(i)];
            result.recall[static_cast<std::size_t>(i)] = rec[static_cast<std::size_t>(i)];
        }
        return result;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": malformed eval result: " + e.what());
    }
}

std::string format_eval(const EvalResult& result) {
    std::ostringstream out;
    out << "accuracy " << format_fixed(result.accuracy, 4) << " over " << result.total
        << " rows\n";
    out << "predicted\\actual";
    for (env::Action a : env::kAllActions) {
        out << '\t' << env::action_name(a);
    }
    out << '\n';
    for (int p = 0; p < 4; ++p) {
        out << env::action_name(static_cast<env::Action>(p));
        for (int a = 0; a < 4; ++a) {
            out << '\t' << result.confusion[static_cast<std::size_t>(p)][static_cast<std::size_t>(a)];
        }
        out << '\n';
    }
    out << "precision";
    for (double v : result.precision) out << '\t' << format_fixed(v, 4);
    out << "\nrecall";
    for (double v : result.recall) out << '\t' << format_fixed(v, 4);
    out << '\n';
    return out.str();
}

namespace {

constexpr const char* kCmniRecordsHeader = "checkpoint,epoch,val_loss,mns_total,cmni";

std::string format_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_cmni_record_line(std::ofstream& out, const CheckpointCmni& rec) {
    if (rec.checkpoint.find(',') != std::string::npos) {
        throw std::invalid_argument("checkpoint id '" + rec.checkpoint +
                                    "' must not contain commas");
    }
    out << rec.checkpoint << ',' << rec.epoch << ',' << format_full(rec.val_loss) << ','
        << format_full(rec.mne) << ',' << format_full(rec.cmni) << '\n';
}

}  // namespace

void write_cmni_records(const std::filesystem::path& path,
                        const std::vector<CheckpointCmni>& records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kCmniRecordsHeader << '\n';
    for (const auto& rec : records) write_cmni_record_line(out, rec);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void append_cmni_record(const std::filesystem::path& path, const CheckpointCmni& record) {
    const bool fresh = !std::filesystem::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    if (fresh) out << kCmniRecordsHeader << '\n';
    write_cmni_record_line(out, record);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::vector<CheckpointCmni> read_cmni_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kCmniRecordsHeader) {
        throw std::runtime_error(path.string() + ":1: unexpected header");
    }
    std::vector<CheckpointCmni> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 5) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 5 fields");
        }
        try {
            CheckpointCmni rec;
            rec.checkpoint = fields[0];
            rec.epoch = std::stoi(fields[1]);
            rec.val_loss = std::stod(fields[2]);
            rec.mne = std::stod(fields[3]);
            rec.cmni = std::stod(fields[4]);
            records.push_back(std::move(rec));
        } catch (const std::exception&) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed record");
        }
    }
    return records;
}

std::vector<CheckpointEval> read_eval_records(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "checkpoint,path") {
        throw std::runtime_error(path.string() + ":1: unexpected header (want checkpoint,path)");
    }
    std::vector<CheckpointEval> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 2 fields");
        }
        CheckpointEval rec;
        rec.checkpoint = line.substr(0, comma);
        std::filesystem::path json_path = line.substr(comma + 1);
        if (json_path.is_relative()) json_path = path.parent_path() / json_path;
        rec.result = read_eval_json(json_path);
        records.push_back(std::move(rec));
    }
    return records;
}

ReportBundle report(const std::vector<neural::SweepEntry>& sweep_entries,
                    const std::vector<CheckpointCmni>& cmni_records,
                    const std::vector<CheckpointEval>& eval_records,
                    const std::filesystem::path& out_dir, const ReportFlags& flags) {
    std::filesystem::create_directories(out_dir);

    // Validate that every record points at a configuration the sweep knows.
    std::map<std::string, std::size_t> prefix_to_index;
    for (std::size_t i = 0; i < sweep_entries.size(); ++i) {
        char sub[16];
        std::snprintf(sub, sizeof(sub), "cfg%03zu", i);
        prefix_to_index[sub] = i;
    }
    std::map<std::string, const CheckpointCmni*> cmni_by_id;
    for (const auto& rec : cmni_records) {
        if (!prefix_to_index.count(config_prefix(rec.checkpoint))) {
            throw std::invalid_argument("cmni record references unknown checkpoint '" +
                                        rec.checkpoint + "'");
        }
        if (!cmni_by_id.emplace(rec.checkpoint, &rec).second) {
            throw std::invalid_argument("duplicate cmni record for checkpoint '" +
                                        rec.checkpoint + "'");
        }
    }
    std::map<std::string, const CheckpointEval*> eval_by_id;
    for (const auto& rec : eval_records) {
        if (!prefix_to_index.count(config_prefix(rec.checkpoint))) {
            throw std::invalid_argument("eval record references unknown checkpoint '" +
                                        rec.checkpoint + "'");
        }
        if (!eval_by_id.emplace(rec.checkpoint, &rec).second) {
            throw std::invalid_argument("duplicate eval record for checkpoint '" +
                                        rec.checkpoint + "'");
        }
    }

    ReportBundle bundle;
    for (std::size_t i = 0; i < sweep_entries.size(); ++i) {
        const auto& entry = sweep_entries[i];
        if (entry.status != "ok") continue;
        const auto it = cmni_by_id.find(entry.best_checkpoint);
        if (it == cmni_by_id.end()) {
            throw std::invalid_argument("no cmni record for best checkpoint '" +
                                        entry.best_checkpoint + "'");
        }
        ReportRow row;
        row.config_index = i;
        row.hp = entry.hp;
        row.checkpoint = entry.best_checkpoint;
        row.best_epoch = entry.best_epoch;
        row.val_loss = entry.best_val_loss;
        row.mne = it->second->mne;
        row.cmni = it->second->cmni;
        const auto ev = eval_by_id.find(entry.best_checkpoint);
        if (ev != eval_by_id.end()) row.accuracy = ev->second->result.accuracy;
        row.mirror_positive = row.val_loss < flags.mirror_positive_val_loss &&
                              row.cmni > flags.mirror_positive_cmni;
        row.mirror_negative = row.cmni < flags.mirror_negative_cmni;
        bundle.rows.push_back(row);
    }

    bundle.table_csv = out_dir / "report_table.csv";
    {
        std::ofstream csv(bundle.table_csv, std::ios::binary | std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + bundle.table_csv.string());
        csv << "config_index,learning_rate,hidden_layers,neurons_per_layer,batch_size,"
               "dropout_rate,seed,best_epoch,val_loss,mns_total,cmni,accuracy,"
               "mirror_positive,mirror_negative\n";
        for (const auto& row : bundle.rows) {
            csv << row.config_index << ',' << format_g(row.hp.learning_rate) << ','
                << row.hp.hidden_layers << ',' << row.hp.neurons_per_layer << ','
                << row.hp.batch_size << ',' << format_g(row.hp.dropout_rate) << ',' << row.hp.seed
                << ',' << row.best_epoch << ',' << format_fixed(row.val_loss, 4) << ','
                << format_fixed(row.mne, 5) << ',' << format_fixed(row.cmni, 5) << ',';
            if (row.accuracy) csv << format_fixed(*row.accuracy, 4);
            csv << ',' << (row.mirror_positive ? 1 : 0) << ',' << (row.mirror_negative ? 1 : 0)
                << '\n';
        }
        if (!csv) throw std::runtime_error("failed writing " + bundle.table_csv.string());
    }

    bundle.series_csv = out_dir / "report_series.csv";
    {
        std::vector<const CheckpointCmni*> series;
        for (const auto& rec : cmni_records) series.push_back(&rec);
        std::sort(series.begin(), series.end(),
                  [](const CheckpointCmni* a, const CheckpointCmni* b) {
                      const std::string pa = config_prefix(a->checkpoint);
                      const std::string pb = config_prefix(b->checkpoint);
                      if (pa != pb) return pa < pb;
                      if (a->epoch != b->epoch) return a->epoch < b->epoch;
                      return a->checkpoint < b->checkpoint;
                  });
        std::ofstream csv(bundle.series_csv, std::ios::binary | std::ios::trunc);
        if (!csv) throw std::runtime_error("cannot write " + bundle.series_csv.string());
        csv << "checkpoint,epoch,val_loss,cmni\n";
        for (const auto* rec : series) {
            csv << rec->checkpoint << ',' << rec->epoch << ',' << format_fixed(rec->val_loss, 6)
                << ',' << format_fixed(rec->cmni, 6) << '\n';
        }
        if (!csv) throw std::runtime_error("failed writing " + bundle.series_csv.string());
    }

    std::ostringstream summary;
    if (bundle.rows.empty()) {
        summary << "no successful configurations\n";
    }
    for (const auto& row : bundle.rows) {
        summary << "config " << row.config_index << ": lr=" << format_g(row.hp.learning_rate)
                << " layers=" << row.hp.hidden_layers << " neurons=" << row.hp.neurons_per_layer
                << " | best epoch " << row.best_epoch << " val_loss "
                << format_fixed(row.val_loss, 4) << " cmni " << format_fixed(row.cmni, 5);
        if (row.accuracy) summary << " accuracy " << format_fixed(*row.accuracy, 4);
        if (row.mirror_positive) summary << " [mirror-positive]";
        if (row.mirror_negative) summary << " [mirror-negative]";
        summary << '\n';
    }
    bundle.summary = summary.str();
    return bundle;
}

}  // namespace frogtoad::evalreport
