#include "translab/prompts.hpp"

#include "translab/errors.hpp"

namespace translab {

namespace {

const PromptBundle kDefaultV1 = {
    "default-v1",

    "You are a code modernization assistant. You translate legacy COBOL programs "
    "into Python 3 while preserving observable behavior exactly: same stdout bytes, "
    "same exit codes, same output files. Respond only with structured actions.",

    "Translate the legacy program {program_id} to Python 3.\n"
    "Write the translation to {entry}.\n"
    "The program must read stdin and write stdout exactly as the original.\n"
    "Legacy source follows:\n"
    "---\n"
    "{source}\n"
    "---\n",

    "Stage {stage} failed. Diagnostic output:\n"
    "---\n"
    "{stderr}\n"
    "---\n"
    "Provide a corrected version.\n",
};

}  // namespace

const PromptBundle& prompt_bundle(const std::string& id) {
    if (id == kDefaultV1.id) return kDefaultV1;
    throw ConfigError("unknown prompt bundle: " + id);
}

std::string render_template(const std::string& tmpl,
                            const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] == '{') {
            std::size_t close = tmpl.find('}', i + 1);
            if (close != std::string::npos) {
                auto it = values.find(tmpl.substr(i + 1, close - i - 1));
                if (it != values.end()) {
                    out += it->second;
                    i = close + 1;
                    continue;
                }
            }
        }
        out += tmpl[i++];
    }
    return out;
}

}  // namespace translab
