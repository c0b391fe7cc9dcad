// Copyright 2026 The sceneforge contributors
// SPDX-License-Identifier: Apache-2.0

#include "sceneforge/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace sceneforge {

namespace {

constexpr char kMagic[8] = {'S', 'F', 'C', 'K', 'P', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

}  // namespace

std::string encode_checkpoint(const ToyModel& model) {
    nlohmann::json header;
    header["format"] = "sceneforge-checkpoint";
    header["version"] = 1;
    header["frozen_seed"] = model.frozen_seed;
    header["dim"] = model.encoder.dim();
    header["hidden"] = model.encoder.hidden();
    header["log_tau"] = model.log_tau;
    std::string data;
    for (const auto& t : model.encoder.params()) {
        const std::size_t bytes = static_cast<std::size_t>(t.value.size()) * sizeof(double);
        header["tensors"].push_back({{"name", t.name},
                                     {"shape", {t.value.rows(), t.value.cols()}},
                                     {"offset", data.size()},
                                     {"bytes", bytes}});
        data.append(reinterpret_cast<const char*>(t.value.data()), bytes);
    }
    const std::string h = header.dump();
    const std::uint64_t len = h.size();
    std::string out(kMagic, sizeof(kMagic));
    out.append(reinterpret_cast<const char*>(&len), sizeof(len));
    out += h;
    out += data;
    return out;
}

ToyModel decode_checkpoint(const std::string& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
        throw Error(ErrorCode::InvalidArgument, "not a sceneforge checkpoint");
    std::uint64_t len;
    std::memcpy(&len, bytes.data() + 8, sizeof(len));
    if (len > bytes.size() - 16) throw Error(ErrorCode::TruncatedFile, "checkpoint header is truncated");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(bytes.substr(16, len));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad checkpoint header: ") + e.what());
    }
    const std::size_t base = 16 + len;
    std::vector<Tensor> tensors;
    try {
        for (const auto& t : header.at("tensors")) {
            const auto rows = t.at("shape").at(0).get<Eigen::Index>();
            const auto cols = t.at("shape").at(1).get<Eigen::Index>();
            const auto off = t.at("offset").get<std::size_t>();
            const std::size_t n = static_cast<std::size_t>(rows * cols) * sizeof(double);
            if (base + off + n > bytes.size()) throw Error(ErrorCode::TruncatedFile, "checkpoint data is truncated");
            Tensor tensor{t.at("name").get<std::string>(), Eigen::MatrixXd(rows, cols)};
            std::memcpy(tensor.value.data(), bytes.data() + base + off, n);
            tensors.push_back(std::move(tensor));
        }
        return ToyModel{ToyPointEncoder(std::move(tensors)), header.at("log_tau").get<double>(),
                        header.at("frozen_seed").get<std::uint64_t>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("bad checkpoint header: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const ToyModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    const auto bytes = encode_checkpoint(model);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "short write to " + path.string());
}

ToyModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
}

}  // namespace sceneforge
