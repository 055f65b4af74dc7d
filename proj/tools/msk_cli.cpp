// msk: command-line front end for the model-space toolkit.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "msk/msk.hpp"

namespace fs = std::filesystem;
using namespace msk;

namespace {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Output {
    RunReport report;
    std::optional<Table> table;
    std::vector<std::pair<std::string, double>> summary;  // human lines, 6 digits
};

struct Common {
    std::uint64_t seed = 0;
    std::string out;
    std::string csv;
    bool quiet = false;
};

std::string num(double v) { return formatDouble(v); }

Table checksAsTable(const RunReport& r) {
    Table t{{"name", "bound", "measured", "pass"}, {}};
    for (const auto& c : r.checks) t.rows.push_back({c.name, num(c.bound), num(c.measured), c.pass ? "true" : "false"});
    return t;
}

Table coronaTable(const CarlesonReport& c) {
    Table t{{"subset", "fNorm", "gNorm", "residual"}, {}};
    for (const auto& row : c.table) t.rows.push_back({std::to_string(row.mask), num(row.fNorm), num(row.gNorm), num(row.residual)});
    return t;
}

Json coronaJson(const CarlesonReport& c) {
    Json rows = Json::array();
    for (const auto& row : c.table)
        rows.push_back({{"subset", row.mask},
                        {"fNorm", row.fNorm},
                        {"gNorm", row.gNorm},
                        {"residual", row.residual},
                        {"minimalFNorm", row.minimalFNorm}});
    return {{"constant", c.constant}, {"exhaustive", c.exhaustive}, {"subsetsExamined", c.subsetsExamined}, {"table", rows}};
}

struct Loaded {
    Json json;
    std::string text;
};

Loaded load(RunReport& report, const std::string& name, const std::string& path) {
    Loaded l;
    l.text = readTextFile(path);
    report.addInput(name, l.text);
    try {
        l.json = Json::parse(l.text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    return l;
}

// analyze ----------------------------------------------------------------

struct AnalyzeArgs {
    std::string zeros, family;
};

Output runAnalyze(const AnalyzeArgs& a) {
    Output o;
    RunReport& r = o.report;
    std::vector<BlaschkeProduct> family;
    if (!a.family.empty()) {
        family = familyFromJson(load(r, "family", a.family).json);
    } else {
        family.push_back(zerosFromJson(load(r, "zeros", a.zeros).json));
    }
    const SequenceConstants c = computeSequenceConstants(family);
    const BlaschkeProduct theta = productOf(family);
    int nMax = 0;
    for (const auto& f : family) nMax = std::max(nMax, f.degree());
    const double etaCap = 1.0 / kFiveRootTwo;
    r.results = {{"degree", theta.degree()},
                 {"factors", family.size()},
                 {"eta", c.eta},
                 {"delta", c.delta},
                 {"carleson", theta.hasRepeatedZero() ? Json(nullptr) : Json(c.carleson)},
                 {"gate", betaGate(nMax)},
                 {"etaGate", {{"bound", etaCap}, {"measured", c.eta}, {"pass", c.eta <= etaCap}}}};
    if (c.hasZeroPair) r.check("delta<=eta", c.eta, c.delta, c.delta <= c.eta + 1e-15);
    r.check("delta>=0", 0.0, c.delta, c.delta >= 0);
    o.summary = {{"eta", c.eta}, {"delta", c.delta}, {"carleson", c.carleson}, {"gate", betaGate(nMax)}};
    Table t{{"index", "re", "im", "psiAtZero"}, {}};
    Json perZero = Json::array();
    for (int k = 0; k < theta.degree(); ++k) {
        const Complex z = theta.zero(k).value();
        const double v = std::abs(theta.withoutIndex(k)(z));
        perZero.push_back({{"re", z.real()}, {"im", z.imag()}, {"psiAtZero", v}});
        t.rows.push_back({std::to_string(k), num(z.real()), num(z.imag()), num(v)});
    }
    r.results["zeros"] = perZero;
    o.table = t;
    return o;
}

// qnorm ------------------------------------------------------------------

struct QnormArgs {
    std::string zeros, function;
    int psi = -1;
    int hankel = 0;
};

Output runQnorm(const QnormArgs& a) {
    Output o;
    RunReport& r = o.report;
    const BlaschkeProduct theta = zerosFromJson(load(r, "zeros", a.zeros).json);
    if (theta.empty()) throw Error(ErrorCode::ParseError, "theta needs at least one zero");
    FunctionRep u = FunctionRep::constant(1.0);
    if (!a.function.empty()) {
        u = functionRepFromJson(load(r, "function", a.function).json, theta);
    } else {
        const int j = a.psi >= 0 ? a.psi : theta.degree() - 1;
        if (j >= theta.degree()) throw Error(ErrorCode::ParseError, "--psi index out of range");
        u = FunctionRep::blaschke(theta.withoutIndex(j));
        r.results["psiIndex"] = j;
    }
    const double q = quotientNorm(u, theta);
    r.results["quotientNorm"] = q;
    o.summary.push_back({"quotientNorm", q});
    const double sup = boundarySupNorm(u, boundaryGridSize());
    r.results["boundarySupNorm"] = sup;
    r.check("quotientNorm<=supNorm", sup, q, q <= sup * (1 + 1e-9) + 1e-12);
    if (a.hankel > 0) {
        const double h = hankelQuotientNormOracle(u, theta, a.hankel);
        r.results["hankelOracle"] = h;
        r.check("hankelAgreement", 1e-4, std::abs(h - q), std::abs(h - q) <= 1e-4);
    }
    return o;
}

// shift ------------------------------------------------------------------

struct ShiftArgs {
    std::string zeros;
};

Output runShift(const ShiftArgs& a) {
    Output o;
    RunReport& r = o.report;
    const BlaschkeProduct theta = zerosFromJson(load(r, "zeros", a.zeros).json);
    const ModelOperator m = buildModelOperator(theta);
    r.results = modelToJson(m);
    const double ann = linalg::spectralNorm(evaluateBlaschke(theta, m.shift));
    const double norm = linalg::spectralNorm(m.shift);
    r.check("annihilation", 1e-9, ann, ann <= 1e-9);
    r.check("contraction", 1.0 + 1e-10, norm, norm <= 1.0 + 1e-10);
    return o;
}

// similar ----------------------------------------------------------------

struct SimilarArgs {
    std::string t1, t2;
    bool model = false;
    double beta1 = 0.9, beta2 = 0.9;
    std::optional<double> psiNorm;
    int maxSamples = kDefaultMaxSamples;
};

void certificateChecks(RunReport& r, const SimilarityCertificate& c) {
    r.check("intertwineResidual", c.residTol, c.intertwineResidual, c.residualOk());
    if (c.theoreticalBound)
        r.check("normBound", *c.theoreticalBound, std::max(c.normX, c.normXinv), c.withinBound());
    if (c.inverseBound) r.check("inverseBound", *c.inverseBound, c.normXinv, c.normXinv <= *c.inverseBound * (1 + 1e-6));
}

Output runSimilar(const SimilarArgs& a, std::uint64_t seed) {
    Output o;
    RunReport& r = o.report;
    const C0Instance t1 = instanceFromJson(load(r, "t1", a.t1).json);
    SimilarityCertificate c;
    if (a.psiNorm) {
        if (!a.t2.empty()) throw Error(ErrorCode::ParseError, "--psi-norm targets the model operator; drop --t2");
        if (t1.theta.degree() == 2 && !t1.theta.hasRepeatedZero())
            c = buildSimilarityDim2(t1, *a.psiNorm, seed, a.maxSamples);
        else
            c = buildSimilarityFromIsomorphismBound(t1, *a.psiNorm, seed, a.maxSamples);
    } else {
        C0Instance t2;
        if (!a.t2.empty())
            t2 = instanceFromJson(load(r, "t2", a.t2).json);
        else if (a.model)
            t2 = modelInstance(t1.theta);
        else
            throw Error(ErrorCode::ParseError, "give --t2 or --model");
        c = buildSimilarity(t1, t2, a.beta1, a.beta2, seed, a.maxSamples);
    }
    r.results = certificateToJson(c);
    certificateChecks(r, c);
    o.summary = {{"normX", c.normX}, {"normXinv", c.normXinv}, {"residual", c.intertwineResidual}};
    return o;
}

// decompose, corona, check-carleson ------------------------------------

struct FamilyArgs {
    std::string instance, family;
    long long subset = -1;
    std::optional<double> beta;
    int budget = kSubsetBudget;
};

Output runDecompose(const FamilyArgs& a) {
    Output o;
    RunReport& r = o.report;
    const C0Instance t = instanceFromJson(load(r, "instance", a.instance).json);
    const auto family = familyFromJson(load(r, "family", a.family).json);
    if (!productOf(family).sameZeroMultiset(t.theta))
        throw Error(ErrorCode::HypothesisViolated, "product of the family differs from the instance's minimal function");
    const BlockDecomposition d = blockDecompose(t.matrix, family);
    Json blocks = Json::array();
    for (const auto& b : d.blocks) blocks.push_back(matrixToJson(b));
    r.results = {{"Y", matrixToJson(d.y)},
                 {"normY", d.normY},
                 {"normYinv", d.normYinv},
                 {"residual", d.residual},
                 {"carlesonConstant", d.carlesonConstant},
                 {"bound", d.bound},
                 {"groupNormSup", d.groupNormSup},
                 {"blocks", blocks}};
    r.check("offDiagonalResidual", 1e-7, d.residual, d.residual <= 1e-7);
    o.summary = {{"normY", d.normY}, {"normYinv", d.normYinv}, {"carlesonConstant", d.carlesonConstant}};
    r.check("normBound", d.bound, std::max(d.normY, d.normYinv), std::max(d.normY, d.normYinv) <= d.bound * (1 + 1e-6));
    r.check("unitarity", 1e-8, d.unitarityResidual, d.unitarityResidual <= 1e-8);
    r.check("groupLaws", 1e-8, d.laws.worst(), d.laws.worst() <= 1e-8);
    return o;
}

Output runCorona(const FamilyArgs& a, std::uint64_t seed) {
    Output o;
    RunReport& r = o.report;
    const auto family = familyFromJson(load(r, "family", a.family).json);
    requirePairwiseCoprime(family);
    if (a.subset < 0) {
        const CarlesonReport c = generalizedCarlesonConstant(family, a.budget, seed);
        r.results = coronaJson(c);
        o.summary = {{"constant", c.constant}};
        double worst = 0;
        for (const auto& row : c.table) worst = std::max(worst, row.residual);
        r.check("bezoutResidual", 1e-8, worst, worst <= 1e-8);
        o.table = coronaTable(c);
        return o;
    }
    const SubsetMask full = family.empty() ? 0 : (~SubsetMask{0} >> (64 - family.size()));
    const auto mask = static_cast<SubsetMask>(a.subset);
    if ((mask & ~full) != 0) throw Error(ErrorCode::ParseError, "--subset has bits beyond the family size");
    const CoronaCertificate c = coronaSolve(subsetProduct(family, mask), subsetProduct(family, full & ~mask));
    r.results = {{"subset", mask},
                 {"kind", c.kind},
                 {"fNorm", c.fNorm},
                 {"gNorm", c.gNorm},
                 {"minimalFNorm", c.minimalFNorm},
                 {"residual", c.bezoutResidual}};
    r.check("bezoutResidual", 1e-8, c.bezoutResidual, c.bezoutResidual <= 1e-8);
    o.summary = {{"fNorm", c.fNorm}, {"gNorm", c.gNorm}, {"minimalFNorm", c.minimalFNorm}};
    o.table = Table{{"subset", "fNorm", "gNorm", "residual"},
                    {{std::to_string(mask), num(c.fNorm), num(c.gNorm), num(c.bezoutResidual)}}};
    return o;
}

Output runCheckCarleson(const FamilyArgs& a, std::uint64_t seed) {
    Output o;
    RunReport& r = o.report;
    const auto family = familyFromJson(load(r, "family", a.family).json);
    const CarlesonReport c = generalizedCarlesonConstant(family, a.budget, seed);
    const SequenceConstants s = computeSequenceConstants(family);
    r.results = {{"generalized", coronaJson(c)}, {"classical", s.carleson}, {"eta", s.eta}, {"delta", s.delta}};
    o.summary = {{"generalized", c.constant}, {"classical", s.carleson}};
    double worst = 0;
    for (const auto& row : c.table) worst = std::max(worst, row.residual);
    r.check("bezoutResidual", 1e-8, worst, worst <= 1e-8);
    bool singletons = true;
    for (const auto& f : family) singletons = singletons && f.degree() == 1;
    if (a.beta && singletons && !family.empty()) {
        const BlaschkeProduct all = productOf(family);
        const DiagonalWitness w = diagonalWitness(all.zeros(), *a.beta);
        r.results["diagonalWitness"] = {{"values", w.values}, {"minimum", w.minimum}};
        r.check("diagonalWitness", *a.beta, w.minimum, w.pass);
    }
    o.table = coronaTable(c);
    return o;
}

// pipeline ---------------------------------------------------------------

struct PipelineArgs {
    std::string instance, family;
    double beta = 0.9;
    int maxSamples = kDefaultMaxSamples;
};

Output runPipeline(const PipelineArgs& a, std::uint64_t seed) {
    Output o;
    RunReport& r = o.report;
    const C0Instance t = instanceFromJson(load(r, "instance", a.instance).json);
    const auto family = familyFromJson(load(r, "family", a.family).json);
    const PipelineReport p = similarityPipeline(t, family, a.beta, seed, a.maxSamples);
    Json blocks = Json::array();
    Table table{{"block", "degree", "route", "normX", "normXinv", "bound"}, {}};
    for (const auto& b : p.blocks) {
        blocks.push_back({{"index", b.index},
                          {"degree", b.degree},
                          {"route", b.route},
                          {"normX", b.normX},
                          {"normXinv", b.normXinv},
                          {"bound", b.bound}});
        table.rows.push_back({std::to_string(b.index), std::to_string(b.degree), b.route, num(b.normX), num(b.normXinv), num(b.bound)});
    }
    r.results = {{"route", p.route},
                 {"eta", p.eta},
                 {"effectiveBeta", p.effectiveBeta},
                 {"gate", p.gate},
                 {"worstRestrictedRatio", p.worstRestrictedRatio},
                 {"decompositionBoundT", p.decompositionBoundT},
                 {"decompositionBoundS", p.decompositionBoundS},
                 {"blocks", blocks},
                 {"certificate", certificateToJson(p.certificate)}};
    certificateChecks(r, p.certificate);
    o.summary = {{"normX", p.certificate.normX}, {"normXinv", p.certificate.normXinv},
                 {"residual", p.certificate.intertwineResidual}};
    o.table = table;
    return o;
}

// generate ---------------------------------------------------------------

struct GenerateArgs {
    std::string theta;
    std::string kind = "unitaryConjugate";
    double cond = 1.0;
};

Output runGenerate(const GenerateArgs& a, std::uint64_t seed, Json& instanceOut) {
    Output o;
    RunReport& r = o.report;
    GeneratorSpec spec;
    spec.theta = zerosFromJson(load(r, "theta", a.theta).json);
    if (spec.theta.empty()) throw Error(ErrorCode::ParseError, "theta needs at least one zero");
    spec.kind = parseGeneratorKind(a.kind);
    spec.conditioning = a.cond;
    spec.seed = seed;
    const C0Instance inst = generate(spec);
    instanceOut = instanceToJson(inst);
    const ValidationReport v = validate(inst, seed);
    for (const auto& c : v.clauses) r.check(c.name, c.bound, c.measured, c.pass);
    r.results = {{"generator", inst.provenance.generator}, {"conditioning", inst.provenance.conditioning}};
    return o;
}

// verify -----------------------------------------------------------------

struct VerifyArgs {
    std::string corpus;
    bool generateCorpus = false;
    std::string filter;
};

Output runVerify(const VerifyArgs& a, std::uint64_t seed) {
    Output o;
    RunReport& r = o.report;
    AcceptanceOptions options;
    options.seed = seed;
    if (a.generateCorpus || a.corpus.empty()) {
        options.corpus = generateCorpus(seed);
        if (!a.corpus.empty()) {
            fs::create_directories(a.corpus);
            for (std::size_t i = 0; i < options.corpus.size(); ++i) {
                char name[32];
                std::snprintf(name, sizeof name, "instance_%03zu.json", i);
                writeTextFile((fs::path(a.corpus) / name).string(), dumpJson(instanceToJson(options.corpus[i])) + "\n");
            }
        }
        r.results["corpus"] = {{"generated", true}, {"instances", options.corpus.size()}};
    } else {
        if (!fs::is_directory(a.corpus)) throw Error(ErrorCode::ParseError, a.corpus + " is not a directory");
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(a.corpus))
            if (e.path().extension() == ".json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::string all;
        for (const auto& f : files) {
            const std::string text = readTextFile(f.string());
            all += text;
            try {
                options.corpus.push_back(instanceFromJson(Json::parse(text)));
            } catch (const nlohmann::json::exception& e) {
                throw Error(ErrorCode::ParseError, f.string() + ": " + e.what());
            }
        }
        r.addInput("corpus", all);
        r.results["corpus"] = {{"generated", false}, {"instances", options.corpus.size()}};
    }
    const auto results = runAcceptance(options, a.filter);
    if (results.empty()) throw Error(ErrorCode::ParseError, "--filter '" + a.filter + "' matches no check");
    Json details = Json::array();
    Table table{{"name", "pass", "measured", "bound", "seconds", "detail"}, {}};
    for (const auto& c : results) {
        r.check(c.name, c.bound, c.measured, c.pass);
        details.push_back({{"name", c.name}, {"pass", c.pass}, {"seconds", c.seconds}, {"detail", c.detail}});
        table.rows.push_back({c.name, c.pass ? "true" : "false", num(c.measured), num(c.bound), num(c.seconds), c.detail});
    }
    r.results["criteria"] = details;
    o.table = table;
    return o;
}

// driver -----------------------------------------------------------------

void addCommon(CLI::App* sub, Common& common) {
    sub->add_option("--seed", common.seed, "Seed for every random choice")->capture_default_str();
    sub->add_option("--out", common.out, "Write the JSON report here instead of stdout");
    sub->add_option("--csv", common.csv, "Also write the command's table as CSV");
    sub->add_flag("--quiet", common.quiet, "No human-readable summary on stderr");
}

int emit(const std::string& command, Output& o, const Common& common) {
    o.report.command = command;
    o.report.results["grid"] = boundaryGridSize();
    o.report.results["seed"] = common.seed;
    const std::string text = dumpJson(o.report.toJson()) + "\n";
    if (common.out.empty())
        std::cout << text;
    else
        writeTextFile(common.out, text);
    if (!common.csv.empty()) {
        const Table t = o.table ? *o.table : checksAsTable(o.report);
        writeTextFile(common.csv, csvTable(t.header, t.rows));
    }
    if (!common.quiet) {
        for (const auto& [label, value] : o.summary) std::cerr << label << " = " << humanDouble(value) << '\n';
        std::cerr << checksTable(o.report);
    }
    return o.report.passed() ? kExitOk : kExitCheckFailed;
}

int emitError(const std::string& command, const std::string& code, const std::string& message, int exitCode,
              const Common& common) {
    RunReport r;
    r.command = command;
    r.results = {{"error", {{"code", code}, {"message", message}}}};
    const std::string text = dumpJson(r.toJson()) + "\n";
    try {
        if (common.out.empty())
            std::cout << text;
        else
            writeTextFile(common.out, text);
    } catch (const Error&) {
        std::cout << text;
    }
    std::cerr << "msk " << command << ": " << message << '\n';
    return exitCode;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Model-space toolkit: compressed shifts, similarity certificates and corona decompositions"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Common common;

    AnalyzeArgs analyze;
    auto* sAnalyze = app.add_subcommand("analyze", "Separation constants of a zero set or factorization");
    auto* zOpt = sAnalyze->add_option("--zeros", analyze.zeros, "Zeros JSON");
    sAnalyze->add_option("--family", analyze.family, "Family JSON (array of zero arrays)")->excludes(zOpt);

    QnormArgs qnorm;
    auto* sQnorm = app.add_subcommand("qnorm", "Quotient norm of a function modulo theta");
    sQnorm->add_option("--zeros", qnorm.zeros, "Zeros of theta")->required();
    auto* fOpt = sQnorm->add_option("--function", qnorm.function, "Function JSON");
    sQnorm->add_option("--psi", qnorm.psi, "Use theta with zero j removed (default: last zero)")->excludes(fOpt);
    sQnorm->add_option("--hankel", qnorm.hankel, "Cross-check with a Hankel truncation of this size");

    ShiftArgs shift;
    auto* sShift = app.add_subcommand("shift", "Matrix of the compressed shift in the orthonormal rational basis");
    sShift->add_option("--zeros", shift.zeros, "Zeros JSON")->required();

    SimilarArgs similar;
    double psiNorm = 0;
    auto* sSimilar = app.add_subcommand("similar", "Certificate X with X T1 = T2 X");
    sSimilar->add_option("--t1", similar.t1, "First instance JSON")->required();
    auto* t2Opt = sSimilar->add_option("--t2", similar.t2, "Second instance JSON");
    sSimilar->add_flag("--model", similar.model, "Target the model operator of the same theta")->excludes(t2Opt);
    sSimilar->add_option("--beta1", similar.beta1, "Cyclic-vector threshold for T1")->capture_default_str();
    sSimilar->add_option("--beta2", similar.beta2, "Cyclic-vector threshold for T2")->capture_default_str();
    auto* psiOpt = sSimilar->add_option("--psi-norm", psiNorm, "Target the model, assuming ||psi_N(T)|| >= 1/psi-norm");
    sSimilar->add_option("--max-samples", similar.maxSamples, "Cyclic-vector search budget")->capture_default_str();

    FamilyArgs decompose;
    auto* sDecompose = app.add_subcommand("decompose", "Block-diagonalize T along a coprime factorization");
    sDecompose->add_option("--instance", decompose.instance, "Instance JSON")->required();
    sDecompose->add_option("--family", decompose.family, "Family JSON")->required();

    FamilyArgs corona;
    auto* sCorona = app.add_subcommand("corona", "Bezout pairs f theta_A + g theta/theta_A = 1");
    sCorona->add_option("--family", corona.family, "Family JSON")->required();
    sCorona->add_option("--subset", corona.subset, "Bitmask of A (default: every subset)");
    sCorona->add_option("--budget", corona.budget, "Subset budget before sampling")->capture_default_str();

    FamilyArgs carleson;
    auto* sCarleson = app.add_subcommand("check-carleson", "Generalized and classical Carleson constants");
    sCarleson->add_option("--family", carleson.family, "Family JSON")->required();
    double carlesonBeta = 0;
    auto* cbOpt = sCarleson->add_option("--beta", carlesonBeta, "Threshold for the diagonal witness (singleton families)");
    sCarleson->add_option("--budget", carleson.budget, "Subset budget before sampling")->capture_default_str();

    PipelineArgs pipeline;
    auto* sPipeline = app.add_subcommand("pipeline", "Similarity to the model through a factorization");
    sPipeline->add_option("--instance", pipeline.instance, "Instance JSON")->required();
    sPipeline->add_option("--family", pipeline.family, "Family JSON")->required();
    sPipeline->add_option("--beta", pipeline.beta, "Restricted-norm constant")->capture_default_str();
    sPipeline->add_option("--max-samples", pipeline.maxSamples, "Cyclic-vector search budget")->capture_default_str();

    GenerateArgs gen;
    auto* sGenerate = app.add_subcommand("generate", "Random instance with a prescribed minimal function");
    sGenerate->add_option("--theta", gen.theta, "Zeros JSON")->required();
    sGenerate->add_option("--kind", gen.kind, "unitaryConjugate | invertibleConjugate | modelItself | diagonalIfDistinct")
        ->capture_default_str();
    sGenerate->add_option("--cond", gen.cond, "Target condition number of the conjugator")->capture_default_str();

    VerifyArgs verify;
    auto* sVerify = app.add_subcommand("verify", "Run the property suites");
    sVerify->add_option("--corpus", verify.corpus, "Directory of instance JSON files");
    sVerify->add_flag("--generate-corpus", verify.generateCorpus, "Generate the corpus (into --corpus if given)");
    sVerify->add_option("--filter", verify.filter, "Run only checks whose name contains this");

    for (auto* sub : app.get_subcommands([](CLI::App*) { return true; })) addCommon(sub, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    try {
        Output o;
        if (sub == sAnalyze) {
            if (analyze.zeros.empty() && analyze.family.empty()) throw Error(ErrorCode::ParseError, "give --zeros or --family");
            o = runAnalyze(analyze);
        } else if (sub == sQnorm) {
            o = runQnorm(qnorm);
        } else if (sub == sShift) {
            o = runShift(shift);
        } else if (sub == sSimilar) {
            if (psiOpt->count() > 0) similar.psiNorm = psiNorm;
            o = runSimilar(similar, common.seed);
        } else if (sub == sDecompose) {
            o = runDecompose(decompose);
        } else if (sub == sCorona) {
            o = runCorona(corona, common.seed);
        } else if (sub == sCarleson) {
            if (cbOpt->count() > 0) carleson.beta = carlesonBeta;
            o = runCheckCarleson(carleson, common.seed);
        } else if (sub == sPipeline) {
            o = runPipeline(pipeline, common.seed);
        } else if (sub == sGenerate) {
            Json inst;
            o = runGenerate(gen, common.seed, inst);
            // For generate, --out names the instance file and the report goes to stdout.
            if (common.out.empty()) {
                o.report.results["instance"] = inst;
            } else {
                writeTextFile(common.out, dumpJson(inst) + "\n");
                o.report.results["instanceFile"] = common.out;
                common.out.clear();
            }
        } else if (sub == sVerify) {
            o = runVerify(verify, common.seed);
        }
        return emit(command, o, common);
    } catch (const Error& e) {
        return emitError(command, std::string(toString(e.code())), e.what(), exitCodeFor(e.code()), common);
    } catch (const std::exception& e) {
        return emitError(command, "InternalError", e.what(), kExitCheckFailed, common);
    }
}
