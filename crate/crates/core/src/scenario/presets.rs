//! Built-in scenarios, stored as scenario text.

pub const PRESET_NAMES: &[&str] = &[
    "example1-itm",
    "example1-ddm",
    "example2-itm",
    "example2-ddm",
    "example3-itm",
    "example3-ddm",
    "example4-itm",
    "example4-ddm",
    "blowup-ddm",
];

const EXAMPLE1_MODEL: &str = "\
[hazard]
rate = exp-decay
amplitude = 1
decay = 9
refractory = fixed
sigma = 0.5
[initial]
kind = plateau-exp
height = 0.5
knee = 1
";

const EXAMPLE2_MODEL: &str = "\
[hazard]
rate = hill
amplitude = 10
offset = 0.5
refractory = fixed
sigma = 1
[initial]
kind = shifted-exp
onset = 1
";

const EXAMPLE3_MODEL: &str = "\
[hazard]
rate = logistic
slope = 9
shift = 3.5
refractory = fixed
sigma = 0.5
[initial]
kind = shifted-exp
onset = 0.5
";

const EXAMPLE4_INITIAL: &str = "\
[initial]
kind = shifted-exp
onset = 1
";

/// Scenario text of a preset.
pub fn preset_text(name: &str) -> Option<&'static str> {
    static TEXTS: std::sync::OnceLock<Vec<(&'static str, String)>> = std::sync::OnceLock::new();
    let texts = TEXTS.get_or_init(|| PRESET_NAMES.iter().map(|&n| (n, build(n))).collect());
    texts
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| t.as_str())
}

fn build(name: &str) -> String {
    let body = match name {
        "example1-itm" => format!(
            "[model]\nequation = itm\n{EXAMPLE1_MODEL}[grid]\nds = 0.02\nT = 30\n[output]\nsnapshots = 0, 10, 30\n"
        ),
        "example1-ddm" => format!(
            "[model]\nequation = ddm\n{EXAMPLE1_MODEL}[kernel]\nkind = gaussian\nd = 0.5\nlambda = 1e-3\nJ = 1\n\
             [grid]\nds = 0.02\nT = 20\n[output]\nsnapshots = 0, 15, 20\n"
        ),
        "example2-itm" => format!(
            "[model]\nequation = itm\n{EXAMPLE2_MODEL}[grid]\nds = 0.02\nT = 20\n[output]\nsnapshots = 0, 10, 20\n"
        ),
        "example2-ddm" => format!(
            "[model]\nequation = ddm\n{EXAMPLE2_MODEL}[kernel]\nkind = exponential\nlambda = 1e-3\nJ = 1\nmethod = ode\n\
             [grid]\nds = 0.02\ndt = 1e-4\nT = 20\n[output]\nsnapshots = 0, 10, 20\n"
        ),
        "example3-itm" => format!(
            "[model]\nequation = itm\n{EXAMPLE3_MODEL}[grid]\nds = 0.02\nT = 20\n\
             [branch]\npolicy = fixed-index\nindex = 2\n[output]\nsnapshots = 0, 10, 20\n"
        ),
        "example3-ddm" => format!(
            "[model]\nequation = ddm\n{EXAMPLE3_MODEL}[kernel]\nkind = exponential\nlambda = 1e-3\nJ = 1\nmethod = ode\n\
             [grid]\nds = 0.02\ndt = 2.5e-4\nT = 20\n[output]\nsnapshots = 0, 10, 20\n"
        ),
        "example4-itm" => format!(
            "[model]\nequation = itm\n[hazard]\nrate = constant\nvalue = 1\nrefractory = variable\n\
             max_period = 2\ndrop = 1\nscale = 2.5\n{EXAMPLE4_INITIAL}[grid]\nds = 0.02\nT = 14\n\
             [output]\nsnapshots = 0, 7, 14\n"
        ),
        "example4-ddm" => format!(
            "[model]\nequation = ddm\n[hazard]\nrate = constant\nvalue = 1\nrefractory = variable\n\
             max_period = 2\ndrop = 1\nscale = 1\n[kernel]\nkind = exponential\nlambda = 1e-3\nJ = 2.5\nmethod = ode\n\
             {EXAMPLE4_INITIAL}[grid]\nds = 0.02\ndt = 2.5e-4\nT = 14\n[output]\nsnapshots = 0, 7, 14\n"
        ),
        "blowup-ddm" => "[model]\nequation = ddm\n[hazard]\nrate = quadratic\noffset = 1\nrefractory = none\n\
             [kernel]\nkind = exponential\nlambda = 1\nJ = 1\nmethod = ode\n\
             [initial]\nkind = indicator\nstart = 0\nend = 1\nheight = 1\n\
             [grid]\nds = 0.01\ndt = 1e-4\nT = 2.6\n[solver]\nactivity_cap = 1e3\n[output]\nsnapshots = 0, 2\n"
            .to_string(),
        _ => unreachable!("unlisted preset {name}"),
    };
    format!("[scenario]\nname = {name}\n{body}")
}
