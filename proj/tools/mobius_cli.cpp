// mobius — command-line front end for the Möbius-plane cipher toolkit.
//
//   keygen   generate MOBS keystream files or MOBK explicit-key files
//   encrypt  plaintext -> MOBC ciphertext container
//   decrypt  MOBC ciphertext container -> plaintext
//   analyze  probability tables, perfectness deviation, forgery statistics,
//            completeness matrices (JSON/CSV reports)
//   audit    incidence-count audit of the circle geometry
//
// Exit codes: 0 success (all requested checks pass), 1 unexpected failure,
// 2 InvalidContainer, 3 KeyMismatch, 4 KeysourceExhausted, 5 TooLarge,
// 6 InvalidKey, 7 BadParams, 8 FieldTooSmall, 9 IoError, 10 a computed
// report disagrees with its closed form.

#include <CLI11.hpp>
#include <json.hpp>

#include "mobius/mobius.hpp"

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace mobius;
using ojson = nlohmann::ordered_json;

namespace {

int exit_code_for(errc c) {
    switch (c) {
        case errc::invalid_container: return 2;
        case errc::key_mismatch: return 3;
        case errc::keysource_exhausted:
        case errc::candidate_stream_exhausted: return 4;
        case errc::too_large: return 5;
        case errc::invalid_key: return 6;
        case errc::bad_params:
        case errc::wrong_characteristic: return 7;
        case errc::field_too_small: return 8;
        case errc::io_error: return 9;
        default: return 1;
    }
}

constexpr int kExitReportMismatch = 10;

// ---------------------------------------------------------------------------
// Small helpers.
// ---------------------------------------------------------------------------

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open for reading: " + path);
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(errc::io_error, "read failed: " + path);
    return data;
}

void write_file(const std::string& path, const std::vector<uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_error, "cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) fail(errc::io_error, "write failed: " + path);
}

uint64_t entropy_seed() {
    std::random_device rd;
    return (uint64_t(rd()) << 32) ^ rd();
}

std::pair<uint64_t, uint64_t> factor_prime_power(uint64_t q) {
    if (q < 2) fail(errc::bad_params, "q must be a prime power >= 2");
    uint64_t p = q;
    for (uint64_t d = 2; d * d <= q; ++d)
        if (q % d == 0) {
            p = d;
            break;
        }
    uint64_t n = 0, m = q;
    while (m % p == 0) {
        m /= p;
        ++n;
    }
    if (m != 1) fail(errc::bad_params, "q = " + std::to_string(q) + " is not a prime power");
    return {p, n};
}

std::string rational_str(const Rational& r) {
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double rational_val(const Rational& r) {
    return double(r.numerator()) / double(r.denominator());
}

ojson rational_json(const Rational& r) {
    return ojson{{"ratio", rational_str(r)}, {"value", rational_val(r)}};
}

// ---------------------------------------------------------------------------
// Field construction from flags.
// ---------------------------------------------------------------------------

struct Config {
    uint64_t p = 2, n = 8, q = 0;
    bool p_set = false, n_set = false, q_set = false;
    std::vector<uint32_t> poly;
    std::vector<uint64_t> ext_poly;
    std::string mode = "stream";
    bool mode_set = false;
    uint64_t seed_value = 0;
    bool seed_set = false;
    std::string in, out, key, key_out;
    uint64_t count = 4096;
    std::string format = "json";
    std::string position = "all";
    bool completeness = false, deviation = false, forgery = false, auth = false, axioms = false;
};

std::pair<uint64_t, uint64_t> resolve_pn(const Config& cfg) {
    uint64_t p = cfg.p, n = cfg.n;
    if (cfg.q_set) {
        auto [qp, qn] = factor_prime_power(cfg.q);
        if ((cfg.p_set && cfg.p != qp) || (cfg.n_set && cfg.n != qn))
            fail(errc::bad_params, "--q disagrees with --p/--n");
        p = qp;
        n = qn;
    }
    return {p, n};
}

FieldCtx make_base_field(const Config& cfg) {
    auto [p, n] = resolve_pn(cfg);
    return cfg.poly.empty() ? FieldCtx::make(p, n) : FieldCtx::make(p, n, cfg.poly);
}

ExtCtx make_extension(const Config& cfg, FieldCtx F) {
    if (cfg.ext_poly.empty()) return ExtCtx::make(std::move(F));
    if (cfg.ext_poly.size() != 2) fail(errc::bad_params, "--ext-poly needs exactly two values: b0,b1");
    if (cfg.ext_poly[0] >= F.order() || cfg.ext_poly[1] >= F.order())
        fail(errc::bad_params, "--ext-poly coefficients must be field element indices below q");
    std::array<FieldElem, 2> b{FieldElem{cfg.ext_poly[0]}, FieldElem{cfg.ext_poly[1]}};
    return ExtCtx::make(std::move(F), b);
}

void require_byte_field(const FieldCtx& F) {
    if (F.p() != 2 || F.n() < 2)
        fail(errc::field_too_small, "byte payloads need GF(2^n) with n >= 2");
}

void check_field_flags_match(const Config& cfg, const FieldCtx& F, const std::string& origin) {
    auto [p, n] = resolve_pn(cfg);
    if ((cfg.p_set || cfg.q_set) && p != F.p())
        fail(errc::bad_params, "--p disagrees with the field of " + origin);
    if ((cfg.n_set || cfg.q_set) && n != F.n())
        fail(errc::bad_params, "--n disagrees with the field of " + origin);
}

// ---------------------------------------------------------------------------
// Report output: --out file, else $MOBIUS_REPORT_DIR/<name>.<fmt>, else stdout.
// ---------------------------------------------------------------------------

void deliver_report(const Config& cfg, const std::string& name, const std::string& body) {
    std::string path = cfg.out;
    if (path.empty()) {
        if (const char* dir = std::getenv("MOBIUS_REPORT_DIR"); dir && *dir) {
            std::error_code ec;
            std::filesystem::create_directories(dir, ec);
            if (ec) fail(errc::io_error, std::string("cannot create report directory ") + dir);
            path = (std::filesystem::path(dir) / (name + "." + cfg.format)).string();
        }
    }
    if (path.empty()) {
        std::cout << body;
        if (body.empty() || body.back() != '\n') std::cout << '\n';
    } else {
        std::vector<uint8_t> bytes(body.begin(), body.end());
        write_file(path, bytes);
        std::cout << "wrote " << path << " (" << bytes.size() << " bytes)\n";
    }
}

std::string render(const Config& cfg, const ojson& j, const std::string& csv) {
    return cfg.format == "csv" ? csv : j.dump(2) + "\n";
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

// ---------------------------------------------------------------------------
// keygen
// ---------------------------------------------------------------------------

int cmd_keygen(const Config& cfg) {
    FieldCtx F = make_base_field(cfg);
    require_byte_field(F);
    ExtCtx G = make_extension(cfg, std::move(F));
    if (cfg.out.empty()) fail(errc::bad_params, "keygen needs --out");

    uint64_t elem_bytes = (G.base().n() * G.base().residue_bits() + 7) / 8;

    if (cfg.mode == "stream") {
        uint64_t seed = cfg.seed_set ? cfg.seed_value : entropy_seed();
        RandomPointSource src(G, seed);
        std::vector<ExtElem> pts;
        pts.reserve(size_t(cfg.count));
        for (uint64_t i = 0; i < cfg.count; ++i) pts.push_back(src.next());
        std::vector<uint8_t> bytes = write_keystream_file(G, pts);
        write_file(cfg.out, bytes);
        uint64_t payload = cfg.count * 2 * elem_bytes;
        std::cout << "keystream points: " << cfg.count << "\n"
                  << "payload bytes:    " << payload << "\n"
                  << "header bytes:     " << (bytes.size() - payload) << "\n"
                  << "total bytes:      " << bytes.size() << "\n";
        if (cfg.seed_set) std::cout << "seed:             " << seed << "\n";
        std::cout << "wrote " << cfg.out << "\n";
        return 0;
    }

    if (cfg.mode == "explicit") {
        // Explicit keys are circles through the message points, so they can
        // only be derived against a concrete plaintext.
        if (cfg.in.empty())
            fail(errc::bad_params, "keygen --mode explicit needs --in (keys depend on the plaintext)");
        std::vector<uint8_t> data = read_file(cfg.in);
        uint64_t seed = cfg.seed_set ? cfg.seed_value : entropy_seed();
        RandomPointSource src(G, seed);
        EncryptOutput enc = encrypt_stream(G, data, src, StreamMode::explicit_key);
        std::vector<uint8_t> bytes = write_key_file(G, enc.keys);
        write_file(cfg.out, bytes);
        std::cout << "plaintext bytes:  " << data.size() << "\n"
                  << "message triples:  " << enc.stats.triples << "\n"
                  << "key circles:      " << enc.keys.size() << "\n"
                  << "key file bytes:   " << bytes.size() << "\n";
        if (cfg.seed_set) std::cout << "seed:             " << seed << "\n";
        std::cout << "wrote " << cfg.out << "\n";
        return 0;
    }

    fail(errc::bad_params, "--mode must be stream or explicit");
}

// ---------------------------------------------------------------------------
// encrypt / decrypt
// ---------------------------------------------------------------------------

void print_stats(const StreamStats& s) {
    std::cout << "triples:          " << s.triples << " (" << s.fallback_triples << " fallback)\n"
              << "message points:   " << s.message_points << "\n"
              << "accepted points:  " << s.accepted_points << "\n"
              << "skipped points:   " << s.skipped_points << "\n";
}

int cmd_encrypt(const Config& cfg) {
    if (cfg.in.empty() || cfg.out.empty()) fail(errc::bad_params, "encrypt needs --in and --out");
    std::vector<uint8_t> data = read_file(cfg.in);

    if (cfg.mode == "stream") {
        std::optional<ExtCtx> ctx;
        std::unique_ptr<PointSource> src;
        if (!cfg.key.empty()) {
            KeystreamFile ks = parse_keystream_file(read_file(cfg.key));
            check_field_flags_match(cfg, ks.G.base(), "the keystream file");
            src = std::make_unique<VectorPointSource>(std::move(ks.points));
            ctx.emplace(std::move(ks.G));
        } else {
            if (!cfg.seed_set)
                fail(errc::bad_params,
                     "stream mode needs --key or --seed (the decryptor must replay the keystream)");
            ctx.emplace(make_extension(cfg, make_base_field(cfg)));
            src = std::make_unique<RandomPointSource>(*ctx, cfg.seed_value);
        }
        const ExtCtx& G = *ctx;
        require_byte_field(G.base());
        EncryptOutput enc = encrypt_stream(G, data, *src, StreamMode::shared_stream);
        write_file(cfg.out, enc.container);
        print_stats(enc.stats);
        std::cout << "container bytes:  " << enc.container.size() << "\n"
                  << "wrote " << cfg.out << "\n";
        return 0;
    }

    if (cfg.mode == "explicit") {
        if (!cfg.key.empty()) {
            KeyFile kf = parse_key_file(read_file(cfg.key));
            check_field_flags_match(cfg, kf.G.base(), "the key file");
            require_byte_field(kf.G.base());
            EncryptOutput enc = encrypt_stream_with_keys(kf.G, data, kf.circles);
            write_file(cfg.out, enc.container);
            print_stats(enc.stats);
            std::cout << "container bytes:  " << enc.container.size() << "\n"
                      << "wrote " << cfg.out << "\n";
            return 0;
        }
        if (cfg.key_out.empty())
            fail(errc::bad_params, "explicit mode needs --key (reuse) or --key-out (derive and save)");
        FieldCtx F = make_base_field(cfg);
        require_byte_field(F);
        ExtCtx G = make_extension(cfg, std::move(F));
        uint64_t seed = cfg.seed_set ? cfg.seed_value : entropy_seed();
        RandomPointSource src(G, seed);
        EncryptOutput enc = encrypt_stream(G, data, src, StreamMode::explicit_key);
        std::vector<uint8_t> key_bytes = write_key_file(G, enc.keys);
        write_file(cfg.key_out, key_bytes);
        write_file(cfg.out, enc.container);
        print_stats(enc.stats);
        std::cout << "container bytes:  " << enc.container.size() << "\n"
                  << "key file bytes:   " << key_bytes.size() << "\n"
                  << "wrote " << cfg.out << " and " << cfg.key_out << "\n";
        return 0;
    }

    fail(errc::bad_params, "--mode must be stream or explicit");
}

int cmd_decrypt(const Config& cfg) {
    if (cfg.in.empty() || cfg.out.empty()) fail(errc::bad_params, "decrypt needs --in and --out");
    CipherContainer cont = parse_container(read_file(cfg.in));
    check_field_flags_match(cfg, cont.G.base(), "the container");

    StreamMode actual = cont.mode;
    if (cfg.mode_set) {
        StreamMode wanted = cfg.mode == "explicit" ? StreamMode::explicit_key : StreamMode::shared_stream;
        if (actual != wanted)
            fail(errc::bad_params, std::string("--mode ") + cfg.mode + " but the container uses " +
                                       (actual == StreamMode::explicit_key ? "explicit keys"
                                                                           : "the shared keystream"));
    }

    DecryptOutput dec = [&] {
        if (actual == StreamMode::shared_stream) {
            if (!cfg.key.empty()) {
                KeystreamFile ks = parse_keystream_file(read_file(cfg.key));
                if (!(ks.G == cont.G))
                    fail(errc::bad_params, "keystream file field parameters differ from the container");
                VectorPointSource src(std::move(ks.points));
                return decrypt_stream(cont, &src, nullptr);
            }
            if (!cfg.seed_set) fail(errc::bad_params, "shared-keystream container needs --key or --seed");
            RandomPointSource src(cont.G, cfg.seed_value);
            return decrypt_stream(cont, &src, nullptr);
        }
        if (cfg.key.empty()) fail(errc::bad_params, "explicit-key container needs --key");
        KeyFile kf = parse_key_file(read_file(cfg.key));
        if (!(kf.G == cont.G)) fail(errc::bad_params, "key file field parameters differ from the container");
        return decrypt_stream(cont, nullptr, &kf.circles);
    }();

    write_file(cfg.out, dec.data);
    print_stats(dec.stats);
    std::cout << "plaintext bytes:  " << dec.data.size() << "\n"
              << "wrote " << cfg.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

ExtCtx extension_for_q(uint64_t q) {
    auto [p, n] = factor_prime_power(q);
    return ExtCtx::make(FieldCtx::make(p, n));
}

struct ReportResult {
    std::string name;
    bool pass = false;
    ojson j;
    std::string csv;
    std::string summary;
};

ReportResult report_tables(const Config& cfg) {
    if (!cfg.q_set) fail(errc::bad_params, "probability tables need --q");
    ExtCtx G = extension_for_q(cfg.q);
    ProbabilityReport rep = aposteriori_tables(G);

    int want_pos = cfg.position == "all" ? 0 : std::stoi(cfg.position);
    ojson rows = ojson::array();
    std::string csv = "position,case,mu,nu,counted_numerator,counted_denominator,realizable,match\n";
    bool pass = true;
    size_t included = 0;
    for (const CaseRow& row : rep.rows) {
        if (want_pos != 0 && row.position != want_pos) continue;
        ++included;
        if (row.realizable && !row.match) pass = false;
        rows.push_back(ojson{{"position", row.position},
                             {"case", row.label},
                             {"mu", rational_json(row.mu)},
                             {"nu", rational_json(row.nu_formula)},
                             {"counted_numerator", row.counted_numerator},
                             {"counted_denominator", row.counted_denominator},
                             {"realizable", row.realizable},
                             {"match", row.match}});
        csv += std::to_string(row.position) + "," + csv_field(row.label) + "," +
               rational_str(row.mu) + "," +
               rational_str(row.nu_formula) + "," + std::to_string(row.counted_numerator) + "," +
               std::to_string(row.counted_denominator) + "," + (row.realizable ? "true" : "false") +
               "," + (row.match ? "true" : "false") + "\n";
    }
    if (included == 0) fail(errc::bad_params, "--position must be all, 1, 2 or 3");

    ReportResult res;
    res.name = "tables-q" + std::to_string(rep.q);
    res.pass = pass;
    res.j = ojson{{"report", "probability-tables"},
                  {"q", rep.q},
                  {"mu_support", rep.mu_support},
                  {"rows", rows},
                  {"all_match", rep.all_match}};
    res.csv = csv;
    res.summary = "probability tables: q=" + std::to_string(rep.q) + ", " + std::to_string(included) +
                  " rows, " + (pass ? "all formulas match" : "MISMATCH");
    return res;
}

ReportResult report_deviation(const Config& cfg) {
    if (!cfg.q_set) fail(errc::bad_params, "deviation report needs --q");
    DeviationReport rep = perfectness_deviation(cfg.q);
    Rational scaled = Rational(int64_t(cfg.q) * int64_t(cfg.q)) * rep.max_deviation;
    bool pass = scaled < kScaledDeviationBound;

    ojson rows = ojson::array();
    std::string csv = "position,case,mu,nu,deviation,deviation_value\n";
    for (const DeviationRow& row : rep.rows) {
        rows.push_back(ojson{{"position", row.position},
                             {"case", row.label},
                             {"mu", rational_json(row.mu)},
                             {"nu", rational_json(row.nu)},
                             {"deviation", rational_json(row.deviation)}});
        csv += std::to_string(row.position) + "," + csv_field(row.label) + "," +
               rational_str(row.mu) + "," +
               rational_str(row.nu) + "," + rational_str(row.deviation) + "," +
               std::to_string(rational_val(row.deviation)) + "\n";
    }

    ReportResult res;
    res.name = "deviation-q" + std::to_string(cfg.q);
    res.pass = pass;
    res.j = ojson{{"report", "perfectness-deviation"},
                  {"q", rep.q},
                  {"rows", rows},
                  {"max_deviation", rational_json(rep.max_deviation)},
                  {"scaled_deviation", rational_json(scaled)},
                  {"scaled_bound", rational_json(kScaledDeviationBound)},
                  {"within_bound", pass}};
    res.csv = csv;
    res.summary = "deviation: q=" + std::to_string(cfg.q) + ", max |mu-nu| = " +
                  rational_str(rep.max_deviation) + ", scaled " + rational_str(scaled) +
                  (pass ? " within bound " : " EXCEEDS bound ") + rational_str(kScaledDeviationBound);
    return res;
}

ReportResult report_forgery(const Config& cfg) {
    if (!cfg.q_set) fail(errc::bad_params, "forgery report needs --q");
    auto [p, n] = factor_prime_power(cfg.q);
    AuthContext ctx = make_auth_context(FieldCtx::make(p, n));
    ForgeryReport rep = forgery_stats(ctx);

    ReportResult res;
    res.name = "forgery-q" + std::to_string(cfg.q);
    res.pass = rep.perfect;
    res.j = ojson{{"report", "forgery-statistics"},
                  {"q", rep.q},
                  {"n0", rep.n0},
                  {"impersonation", rational_json(rep.impersonation)},
                  {"substitution", rational_json(rep.substitution)},
                  {"consistent_keys_min", rep.consistent_keys_min},
                  {"consistent_keys_max", rep.consistent_keys_max},
                  {"sqrt_n0", rep.sqrt_n0},
                  {"perfect", rep.perfect}};
    res.csv = "q,n0,impersonation,substitution,consistent_keys_min,consistent_keys_max,sqrt_n0,perfect\n" +
              std::to_string(rep.q) + "," + std::to_string(rep.n0) + "," + rational_str(rep.impersonation) +
              "," + rational_str(rep.substitution) + "," + std::to_string(rep.consistent_keys_min) + "," +
              std::to_string(rep.consistent_keys_max) + "," + std::to_string(rep.sqrt_n0) + "," +
              (rep.perfect ? "true" : "false") + "\n";
    res.summary = "forgery: q=" + std::to_string(rep.q) + ", impersonation " +
                  rational_str(rep.impersonation) + ", substitution " + rational_str(rep.substitution) +
                  ", consistent keys " + std::to_string(rep.consistent_keys_max) + " = sqrt(" +
                  std::to_string(rep.n0) + ")" + (rep.perfect ? ", perfect" : ", NOT PERFECT");
    return res;
}

ReportResult report_cipher_completeness(const Config& cfg) {
    auto [p, n] = resolve_pn(cfg);
    ExtCtx G = ExtCtx::make(FieldCtx::make(p, n));
    AvalancheMatrix am = cipher_completeness_matrix(G);

    ojson entries = ojson::array();
    std::string csv = "i,j,entry,m_re,m_im,c_re,c_im\n";
    size_t w = 0;
    for (unsigned i = 0; i < 2 * am.n; ++i)
        for (unsigned j = 0; j < 2 * am.n; ++j) {
            ojson e{{"i", i}, {"j", j}, {"entry", bool(am.entry[i][j])}};
            std::string wit = ",,,";
            if (am.entry[i][j] && w < am.witnesses.size()) {
                const AvalancheWitness& wt = am.witnesses[w++];
                e["witness"] = ojson{{"m", {wt.m.re.v, wt.m.im.v}}, {"c", {wt.c.re.v, wt.c.im.v}}};
                wit = std::to_string(wt.m.re.v) + "," + std::to_string(wt.m.im.v) + "," +
                      std::to_string(wt.c.re.v) + "," + std::to_string(wt.c.im.v);
            }
            entries.push_back(std::move(e));
            csv += std::to_string(i) + "," + std::to_string(j) + "," +
                   (am.entry[i][j] ? "true" : "false") + "," + wit + "\n";
        }

    ReportResult res;
    res.name = "completeness-cipher-n" + std::to_string(n);
    res.pass = am.all_true;
    res.j = ojson{{"report", "cipher-completeness"},
                  {"n", am.n},
                  {"bits", 2 * am.n},
                  {"entries", entries},
                  {"all_true", am.all_true}};
    res.csv = csv;
    res.summary = "cipher completeness: n=" + std::to_string(am.n) + ", " + std::to_string(2 * am.n) +
                  "x" + std::to_string(2 * am.n) + " entries " +
                  (am.all_true ? "all true" : "NOT all true") + " (" +
                  std::to_string(am.witnesses.size()) + " witnesses)";
    return res;
}

ReportResult report_auth_completeness(const Config& cfg) {
    auto [p, n] = resolve_pn(cfg);
    FieldCtx F = FieldCtx::make(p, n);
    AuthCompleteness ac = auth_completeness_matrix(F);

    ojson entries = ojson::array();
    std::string csv = "i,j,entry,x1,k1,k2,s,t,u,u_shift\n";
    size_t w = 0;
    for (unsigned i = 0; i < ac.n; ++i)
        for (unsigned j = 0; j < ac.n; ++j) {
            ojson e{{"i", i}, {"j", j}, {"entry", bool(ac.entry[i][j])}};
            std::string wit = ",,,,,,";
            if (ac.entry[i][j] && w < ac.witnesses.size()) {
                const AuthWitness& wt = ac.witnesses[w++];
                e["witness"] = ojson{{"x1", wt.x1}, {"k1", wt.k1}, {"k2", wt.k2},
                                     {"s", wt.s},   {"t", wt.t},   {"u", wt.u},
                                     {"u_shift", wt.u_shift}};
                wit = std::to_string(wt.x1) + "," + std::to_string(wt.k1) + "," +
                      std::to_string(wt.k2) + "," + std::to_string(wt.s) + "," +
                      std::to_string(wt.t) + "," + std::to_string(wt.u) + "," +
                      std::to_string(wt.u_shift);
            }
            entries.push_back(std::move(e));
            csv += std::to_string(i) + "," + std::to_string(j) + "," +
                   (ac.entry[i][j] ? "true" : "false") + "," + wit + "\n";
        }

    ReportResult res;
    res.name = "completeness-auth-n" + std::to_string(n);
    res.pass = ac.all_true;
    res.j = ojson{{"report", "auth-completeness"},
                  {"n", ac.n},
                  {"entries", entries},
                  {"all_true", ac.all_true}};
    res.csv = csv;
    res.summary = "auth completeness: n=" + std::to_string(ac.n) + ", " + std::to_string(ac.n) + "x" +
                  std::to_string(ac.n) + " entries " + (ac.all_true ? "all true" : "NOT all true");
    return res;
}

int cmd_analyze(const Config& cfg) {
    std::vector<ReportResult> results;
    if (cfg.completeness) {
        if (!cfg.n_set && !cfg.q_set) fail(errc::bad_params, "--completeness needs --n (or --q)");
        results.push_back(cfg.auth ? report_auth_completeness(cfg) : report_cipher_completeness(cfg));
    } else if (cfg.auth) {
        fail(errc::bad_params, "--auth selects the authentication completeness matrix; add --completeness");
    }
    if (cfg.deviation) results.push_back(report_deviation(cfg));
    if (cfg.forgery) results.push_back(report_forgery(cfg));
    if (!cfg.completeness && !cfg.deviation && !cfg.forgery) {
        if (!cfg.q_set)
            fail(errc::bad_params,
                 "nothing to analyze: give --q (tables) or --deviation/--forgery/--completeness");
        results.push_back(report_tables(cfg));
    }

    if (!cfg.out.empty() && results.size() > 1)
        fail(errc::bad_params, "--out takes a single report; run one analysis per invocation");

    bool all_pass = true;
    for (const ReportResult& res : results) {
        deliver_report(cfg, res.name, render(cfg, res.j, res.csv));
        std::cout << res.summary << "\n";
        all_pass = all_pass && res.pass;
    }
    return all_pass ? 0 : kExitReportMismatch;
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

int cmd_audit(const Config& cfg) {
    if (!cfg.q_set) fail(errc::bad_params, "audit needs --q");
    ExtCtx G = extension_for_q(cfg.q);
    PlaneAudit a = plane_audit(G);
    bool pass = a.uniform && a.matches_closed_forms;

    ojson j{{"report", "plane-audit"},
            {"q", a.q},
            {"point_count", a.point_count},
            {"circle_count", a.circle_count},
            {"points_per_circle", a.points_per_circle},
            {"circles_through_point", a.circles_through_point},
            {"circles_through_pair", a.circles_through_pair},
            {"tangents_at_point", a.tangents_at_point},
            {"uniform", a.uniform},
            {"matches_closed_forms", a.matches_closed_forms}};
    std::string csv =
        "q,point_count,circle_count,points_per_circle,circles_through_point,circles_through_pair,"
        "tangents_at_point,uniform,matches_closed_forms\n" +
        std::to_string(a.q) + "," + std::to_string(a.point_count) + "," + std::to_string(a.circle_count) +
        "," + std::to_string(a.points_per_circle) + "," + std::to_string(a.circles_through_point) + "," +
        std::to_string(a.circles_through_pair) + "," + std::to_string(a.tangents_at_point) + "," +
        (a.uniform ? "true" : "false") + "," + (a.matches_closed_forms ? "true" : "false") + "\n";

    if (cfg.axioms) {
        AxiomReport ax = verify_axioms(G);
        bool ax_pass = ax.unique_circle_through_triples && ax.touch_axiom && ax.four_point_witness;
        pass = pass && ax_pass;
        j["axioms"] = ojson{{"unique_circle_through_triples", ax.unique_circle_through_triples},
                            {"touch_axiom", ax.touch_axiom},
                            {"four_point_witness", ax.four_point_witness},
                            {"triple_cases", ax.triple_cases},
                            {"touch_cases", ax.touch_cases}};
        std::cout << "axioms: unique-circle " << (ax.unique_circle_through_triples ? "ok" : "FAIL")
                  << " (" << ax.triple_cases << " triples), touch " << (ax.touch_axiom ? "ok" : "FAIL")
                  << " (" << ax.touch_cases << " cases), nondegeneracy "
                  << (ax.four_point_witness ? "ok" : "FAIL") << "\n";
    }

    deliver_report(cfg, "audit-q" + std::to_string(cfg.q), render(cfg, j, csv));
    std::cout << "plane audit: q=" << a.q << ", points=" << a.point_count
              << ", circles=" << a.circle_count << ", per-circle=" << a.points_per_circle
              << ", through-point=" << a.circles_through_point
              << ", through-pair=" << a.circles_through_pair
              << ", tangents=" << a.tangents_at_point << ", "
              << (pass ? "matches closed forms" : "MISMATCH") << "\n";
    return pass ? 0 : kExitReportMismatch;
}

} // namespace

int main(int argc, char** argv) {
    Config cfg;
    CLI::App app{"Möbius-plane cipher toolkit"};
    app.require_subcommand(1);

    auto add_field_flags = [&](CLI::App* sub) {
        sub->add_option("--p", cfg.p, "base field characteristic (default 2)");
        sub->add_option("--n", cfg.n, "base field degree over GF(p) (default 8)");
        sub->add_option("--q", cfg.q, "base field order as a prime power (alternative to --p/--n)");
        sub->add_option("--poly", cfg.poly,
                        "base field modulus coefficients, constant term first (comma separated)")
            ->delimiter(',');
        sub->add_option("--ext-poly", cfg.ext_poly,
                        "quadratic extension coefficients b0,b1 as element indices")
            ->delimiter(',');
    };
    auto add_format_flags = [&](CLI::App* sub) {
        sub->add_option("--format", cfg.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--out", cfg.out, "report output path (default $MOBIUS_REPORT_DIR or stdout)");
    };

    CLI::App* kg = app.add_subcommand("keygen", "generate a keystream (MOBS) or explicit-key (MOBK) file");
    add_field_flags(kg);
    kg->add_option("--mode", cfg.mode, "stream: random candidate points; explicit: derive keys for --in")
        ->check(CLI::IsMember({"stream", "explicit"}));
    kg->add_option("--count", cfg.count, "number of keystream points (stream mode, default 4096)");
    kg->add_option("--seed", cfg.seed_value, "deterministic generator seed (default: system entropy)");
    kg->add_option("--in", cfg.in, "plaintext path (explicit mode)");
    kg->add_option("--out", cfg.out, "output file path");

    CLI::App* en = app.add_subcommand("encrypt", "encrypt a file into a ciphertext container (MOBC)");
    add_field_flags(en);
    en->add_option("--mode", cfg.mode, "stream: shared keystream; explicit: per-triple key circles")
        ->check(CLI::IsMember({"stream", "explicit"}));
    en->add_option("--seed", cfg.seed_value, "seed for the candidate generator");
    en->add_option("--in", cfg.in, "plaintext input path");
    en->add_option("--out", cfg.out, "container output path");
    en->add_option("--key", cfg.key, "key material: MOBS keystream (stream) or MOBK circles (explicit)");
    en->add_option("--key-out", cfg.key_out, "where to save derived keys (explicit mode)");

    CLI::App* de = app.add_subcommand("decrypt", "decrypt a ciphertext container (MOBC)");
    add_field_flags(de);
    de->add_option("--mode", cfg.mode, "expected container mode (cross-checked)")
        ->check(CLI::IsMember({"stream", "explicit"}));
    de->add_option("--seed", cfg.seed_value, "seed that produced the shared keystream");
    de->add_option("--in", cfg.in, "container input path");
    de->add_option("--out", cfg.out, "plaintext output path");
    de->add_option("--key", cfg.key, "key material: MOBS keystream (stream) or MOBK circles (explicit)");

    CLI::App* an = app.add_subcommand("analyze", "probability, deviation, forgery and completeness reports");
    add_field_flags(an);
    add_format_flags(an);
    an->add_option("--position", cfg.position, "restrict probability tables to one position")
        ->check(CLI::IsMember({"all", "1", "2", "3"}));
    an->add_flag("--deviation", cfg.deviation, "perfectness deviation sweep for --q");
    an->add_flag("--forgery", cfg.forgery, "authentication forgery statistics for --q");
    an->add_flag("--completeness", cfg.completeness, "completeness matrix over GF(2^n) (needs --n)");
    an->add_flag("--auth", cfg.auth, "with --completeness: the authentication-tag matrix");

    CLI::App* au = app.add_subcommand("audit", "incidence-count audit of the circle geometry for --q");
    add_field_flags(au);
    add_format_flags(au);
    au->add_flag("--axioms", cfg.axioms, "also verify the three plane axioms exhaustively");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 7;
    }

    for (CLI::App* sub : {kg, en, de, an, au}) {
        if (!sub->parsed()) continue;
        cfg.p_set = sub->count("--p") > 0;
        cfg.n_set = sub->count("--n") > 0;
        cfg.q_set = sub->count("--q") > 0;
        cfg.seed_set = sub->get_option_no_throw("--seed") && sub->count("--seed") > 0;
        cfg.mode_set = sub->get_option_no_throw("--mode") && sub->count("--mode") > 0;
    }

    try {
        if (kg->parsed()) return cmd_keygen(cfg);
        if (en->parsed()) return cmd_encrypt(cfg);
        if (de->parsed()) return cmd_decrypt(cfg);
        if (an->parsed()) return cmd_analyze(cfg);
        if (au->parsed()) return cmd_audit(cfg);
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
