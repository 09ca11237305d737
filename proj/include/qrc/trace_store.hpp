// Copyright 2026 The qrc Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * On-disk reservoir traces and a content-addressed trace cache.
 *
 * File layout (native byte order):
 *
 *   char[8]  magic "QRCTRC01"
 *   u64      key (hash of config echo + dataset contents)
 *   u64      checksum (FNV-1a of every byte after this field)
 *   u64      echo length, then the echo bytes
 *   u64      rows, feature cols, feedback cols, entropy count
 *   f64[]    features (row-major), targets, feedback (row-major), entropy
 */
#pragma once

#include "qrc/error.hpp"
#include "qrc/hash.hpp"
#include "qrc/reservoir.hpp"

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

namespace qrc {

inline std::uint64_t trace_key(const std::string &config_echo, const WindowedDataset &ds) {
    Fnv1a h;
    h.update(config_echo);
    const std::uint64_t dims[3] = {ds.rows(), ds.window_len, ds.horizon};
    h.update(dims, sizeof dims);
    const Eigen::MatrixXd in = ds.inputs;
    h.update(std::span<const double>(in.data(), static_cast<std::size_t>(in.size())));
    h.update(std::span<const double>(ds.targets.data(), static_cast<std::size_t>(ds.targets.size())));
    return h.digest();
}

namespace detail {

inline void put_u64(std::string &buf, std::uint64_t v) {
    buf.append(reinterpret_cast<const char *>(&v), sizeof v);
}

inline void put_doubles(std::string &buf, const double *p, std::size_t n) {
    buf.append(reinterpret_cast<const char *>(p), n * sizeof(double));
}

class Reader {
  public:
    explicit Reader(const std::string &buf) : buf_(buf) {}
    std::uint64_t u64() {
        std::uint64_t v = 0;
        take(&v, sizeof v);
        return v;
    }
    void doubles(double *p, std::size_t n) { take(p, n * sizeof(double)); }
    std::string bytes(std::size_t n) {
        std::string s(n, '\0');
        take(s.data(), n);
        return s;
    }
    [[nodiscard]] bool done() const { return pos_ == buf_.size(); }

  private:
    void take(void *dst, std::size_t n) {
        if (n > buf_.size() - pos_) {
            throw Error(ErrorKind::Io, "trace file truncated");
        }
        std::memcpy(dst, buf_.data() + pos_, n);
        pos_ += n;
    }
    const std::string &buf_;
    std::size_t pos_ = 0;
};

inline constexpr char kTraceMagic[9] = "QRCTRC01";

/// Per-thread temporary name next to `path`, renamed into place when complete.
inline std::filesystem::path temp_sibling(const std::filesystem::path &path) {
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    return std::filesystem::path(path.string() + ".tmp" + hex64(tid));
}

} // namespace detail

inline void save_trace(const std::filesystem::path &path, const ReservoirTrace &trace,
                       std::uint64_t key, const std::string &config_echo) {
    std::string payload;
    detail::put_u64(payload, config_echo.size());
    payload += config_echo;
    const Eigen::Index rows = trace.features.rows();
    detail::put_u64(payload, static_cast<std::uint64_t>(rows));
    detail::put_u64(payload, static_cast<std::uint64_t>(trace.features.cols()));
    detail::put_u64(payload, static_cast<std::uint64_t>(trace.feedback_history.cols()));
    detail::put_u64(payload, trace.per_step_entropy.size());
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f = trace.features;
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> z =
        trace.feedback_history;
    detail::put_doubles(payload, f.data(), static_cast<std::size_t>(f.size()));
    detail::put_doubles(payload, trace.targets.data(), static_cast<std::size_t>(trace.targets.size()));
    detail::put_doubles(payload, z.data(), static_cast<std::size_t>(z.size()));
    detail::put_doubles(payload, trace.per_step_entropy.data(), trace.per_step_entropy.size());

    std::string header(detail::kTraceMagic, 8);
    detail::put_u64(header, key);
    detail::put_u64(header, Fnv1a().update(payload).digest());

    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    const auto tmp = detail::temp_sibling(path);
    {
        std::ofstream os(tmp, std::ios::binary);
        os.write(header.data(), static_cast<std::streamsize>(header.size()));
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!os) {
            throw Error(ErrorKind::Io, "failed writing trace " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

/// Loads a trace, verifying magic, checksum and (when non-zero) the key.
inline ReservoirTrace load_trace(const std::filesystem::path &path, std::uint64_t expected_key = 0,
                                 std::string *config_echo = nullptr) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw Error(ErrorKind::Io, "cannot open trace " + path.string());
    }
    const std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (buf.size() < 24 || buf.compare(0, 8, detail::kTraceMagic) != 0) {
        throw Error(ErrorKind::Io, path.string() + ": not a trace file");
    }
    detail::Reader head(buf);
    (void)head.bytes(8);
    const std::uint64_t key = head.u64();
    const std::uint64_t checksum = head.u64();
    const std::string payload = buf.substr(24);
    if (Fnv1a().update(payload).digest() != checksum) {
        throw Error(ErrorKind::Io, path.string() + ": checksum mismatch");
    }
    if (expected_key != 0 && key != expected_key) {
        throw Error(ErrorKind::Io, path.string() + ": key mismatch");
    }
    detail::Reader r(payload);
    const std::string echo = r.bytes(r.u64());
    const auto rows = static_cast<Eigen::Index>(r.u64());
    const auto fcols = static_cast<Eigen::Index>(r.u64());
    const auto zcols = static_cast<Eigen::Index>(r.u64());
    const auto n_entropy = static_cast<std::size_t>(r.u64());
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> f(rows, fcols);
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> z(rows, zcols);
    ReservoirTrace t;
    t.targets.resize(rows);
    t.per_step_entropy.resize(n_entropy);
    r.doubles(f.data(), static_cast<std::size_t>(f.size()));
    r.doubles(t.targets.data(), static_cast<std::size_t>(rows));
    r.doubles(z.data(), static_cast<std::size_t>(z.size()));
    r.doubles(t.per_step_entropy.data(), n_entropy);
    if (!r.done()) {
        throw Error(ErrorKind::Io, path.string() + ": trailing bytes");
    }
    t.features = f;
    t.feedback_history = z;
    if (config_echo != nullptr) {
        *config_echo = echo;
    }
    return t;
}

/// Content-addressed cache of full-readout (lambda = 1) traces. Requests at
/// lambda < 1 are served by truncating the cached trace. An empty directory
/// disables persistence. Thread-safe for distinct keys.
class TraceCache {
  public:
    TraceCache() = default;
    explicit TraceCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    ReservoirTrace get_or_run(const ReservoirConfig &cfg, const WindowedDataset &ds) {
        cfg.validate();
        ReservoirConfig full = cfg;
        full.lambda_frac = 1.0;
        const std::string echo = full.canonical();
        const std::uint64_t key = trace_key(echo, ds);
        ReservoirTrace trace;
        bool have = false;
        const auto path = dir_ / ("trace-" + hex64(key) + ".bin");
        if (!dir_.empty() && std::filesystem::exists(path)) {
            try {
                std::string stored_echo;
                trace = load_trace(path, key, &stored_echo);
                have = stored_echo == echo &&
                       static_cast<std::size_t>(trace.features.rows()) == ds.rows();
            } catch (const Error &) {
                have = false;  // corrupt entry, resimulate
            }
        }
        if (have) {
            ++hits_;
        } else {
            ++misses_;
            trace = run_reservoir(full, ds);
            if (!dir_.empty()) {
                save_trace(path, trace, key, echo);
            }
        }
        return trace.truncated(cfg.feature_count());
    }

    [[nodiscard]] std::size_t hits() const { return hits_; }
    [[nodiscard]] std::size_t misses() const { return misses_; }
    [[nodiscard]] const std::filesystem::path &dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> misses_{0};
};

} // namespace qrc
