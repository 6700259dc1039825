#include "eyeaffect/log.hpp"

#include <iostream>
#include <mutex>

namespace eyeaffect {

namespace {

std::mutex g_sink_mutex;

WarningSink& sink() {
    static WarningSink s = [](const std::string& message) { std::cerr << "warning: " << message << '\n'; };
    return s;
}

}  // namespace

WarningSink set_warning_sink(WarningSink new_sink) {
    std::lock_guard lock(g_sink_mutex);
    WarningSink previous = std::move(sink());
    sink() = std::move(new_sink);
    return previous;
}

void warn(const std::string& message) {
    std::lock_guard lock(g_sink_mutex);
    if (sink()) {
        sink()(message);
    }
}

}  // namespace eyeaffect
