#include "dselect/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "dselect/csv.hpp"
#include "dselect/errors.hpp"

#include <json.hpp>

namespace dselect {

Dataset Dataset::select(const std::vector<std::size_t>& indices) const {
    Dataset out(indices.size(), cols_);
    out.featureNames_ = featureNames_;
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const std::size_t src = indices[r];
        std::copy_n(values_.data() + src * cols_, cols_, out.values_.data() + r * cols_);
        out.labels_[r] = labels_[src];
    }
    return out;
}

std::vector<std::size_t> Dataset::classCounts() const {
    std::vector<std::size_t> counts(classCount(), 0);
    for (int y : labels_) counts[static_cast<std::size_t>(y)]++;
    return counts;
}

namespace {

std::string formatDouble(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void saveDataset(const Dataset& ds, const DatasetMeta& meta, const std::string& csvPath) {
    std::ofstream out(csvPath, std::ios::binary);
    if (!out) throw ParseError("dataset: cannot write '" + csvPath + "'");
    const auto& names = ds.featureNames();
    for (std::size_t j = 0; j < ds.featureCount(); ++j) {
        out << csvEscape(j < names.size() ? names[j] : "f" + std::to_string(j)) << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < ds.rowCount(); ++i) {
        for (std::size_t j = 0; j < ds.featureCount(); ++j) {
            out << formatDouble(ds.at(i, j)) << ',';
        }
        out << ds.label(i) << '\n';
    }

    nlohmann::json j;
    j["featureNames"] = meta.featureNames.empty() ? names : meta.featureNames;
    j["scaleMin"] = meta.scaleMin;
    j["scaleMax"] = meta.scaleMax;
    j["labelMap"] = {{meta.positiveLabel, 1}, {meta.negativeLabel, 0}};
    j["dselFraction"] = meta.dselFraction;
    std::ofstream metaOut(csvPath + ".meta.json");
    metaOut << j.dump(2) << '\n';
}

Dataset loadDataset(const std::string& csvPath, DatasetMeta* metaOut) {
    RawTable raw = loadCsv(csvPath, {"label"});
    const int labelCol = raw.columnIndex("label");
    const std::size_t d = raw.columnCount() - 1;
    Dataset ds(raw.rowCount(), d);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < raw.columnCount(); ++j) {
        if (static_cast<int>(j) != labelCol) names.push_back(raw.columnNames[j]);
    }
    ds.setFeatureNames(names);
    for (std::size_t i = 0; i < raw.rowCount(); ++i) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < raw.columnCount(); ++j) {
            const std::string& cell = raw.rows[i][j];
            if (static_cast<int>(j) == labelCol) {
                if (cell != "0" && cell != "1") {
                    throw SchemaError("dataset: label must be 0 or 1, got '" + cell + "'");
                }
                ds.label(i) = cell == "1" ? 1 : 0;
            } else {
                try {
                    ds.at(i, col++) = std::stod(cell);
                } catch (const std::exception&) {
                    throw ParseError("dataset: non-numeric cell '" + cell + "' at row " +
                                     std::to_string(i + 2));
                }
            }
        }
    }
    if (metaOut) {
        std::ifstream metaIn(csvPath + ".meta.json");
        if (metaIn) {
            nlohmann::json j;
            metaIn >> j;
            metaOut->featureNames = j.value("featureNames", names);
            metaOut->scaleMin = j.value("scaleMin", std::vector<double>{});
            metaOut->scaleMax = j.value("scaleMax", std::vector<double>{});
            metaOut->dselFraction = j.value("dselFraction", 0.25);
        } else {
            metaOut->featureNames = names;
        }
    }
    return ds;
}

}  // namespace dselect
