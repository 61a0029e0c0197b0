extern "C" const char *lg_version(void) { return "0.1.0"; }
