#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>

// <resolv.h> defines _res as a macro, which breaks Eigen's kernels if they are
// parsed afterwards.
#ifdef _res
#undef _res
#endif

#include "horizonbench/errors.hpp"
#include "horizonbench/market_data.hpp"

namespace horizonbench {

/// Where and how to fetch OHLCV CSV documents.
///
/// Requests are `GET {base_url}/{symbol}?start=YYYY-MM-DD&end=YYYY-MM-DD`.
/// Transient failures (transport errors, 5xx) are retried with exponential
/// backoff; other non-success statuses fail immediately.
struct FetchEndpoint {
    std::string base_url;
    std::string symbol;
    Date start;
    Date end;
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{200};
    std::chrono::seconds timeout{10};
};

inline constexpr const char* kDataUrlEnv = "HORIZONBENCH_DATA_URL";

/// Base URL from the environment, or empty when unset.
inline std::string data_url_from_env() {
    const char* v = std::getenv(kDataUrlEnv);
    return v ? std::string(v) : std::string();
}

namespace detail {

struct SplitUrl {
    std::string origin;  // scheme://host[:port]
    std::string path;    // prefix without trailing slash
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    detail::require(scheme_end != std::string::npos, "endpoint URL must include a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.origin = url;
    } else {
        out.origin = url.substr(0, path_start);
        out.path = url.substr(path_start);
    }
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

}  // namespace detail

inline std::string request_path(const FetchEndpoint& ep) {
    return detail::split_url(ep.base_url).path + "/" + httplib::detail::encode_url(ep.symbol) +
           "?start=" + format_date(ep.start) + "&end=" + format_date(ep.end);
}

/// Downloads and parses a table. The result is identical to running
/// `parse_ohlcv_csv` on the response body.
inline TimeSeriesTable fetch_ohlcv(const FetchEndpoint& ep) {
    detail::require(!ep.base_url.empty(), "no endpoint configured (set " + std::string(kDataUrlEnv) + ")");
    detail::require(!ep.symbol.empty(), "symbol must not be empty");
    detail::require(ep.max_attempts >= 1, "max_attempts must be at least 1");
    auto url = detail::split_url(ep.base_url);
    detail::require(url.origin.rfind("http://", 0) == 0,
                    "only http:// endpoints are supported, got " + ep.base_url);
    const auto path = request_path(ep);

    httplib::Client client(url.origin);
    client.set_connection_timeout(ep.timeout);
    client.set_read_timeout(ep.timeout);

    std::string last_failure;
    auto backoff = ep.initial_backoff;
    for (int attempt = 1; attempt <= ep.max_attempts; ++attempt) {
        auto res = client.Get(path);
        if (res && res->status >= 200 && res->status < 300)
            return parse_ohlcv_csv(res->body, ep.symbol);
        if (res && res->status < 500)
            throw NetworkError("GET " + path + " returned status " + std::to_string(res->status), attempt);
        last_failure = res ? "status " + std::to_string(res->status) : httplib::to_string(res.error());
        if (attempt < ep.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw NetworkError("GET " + url.origin + path + " failed after " + std::to_string(ep.max_attempts) +
                           " attempts: " + last_failure,
                       ep.max_attempts);
}

}  // namespace horizonbench
