#![no_main]

use joint_select::Permutation;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(p) = text.parse::<Permutation>() {
        let back: Permutation = p.to_string().parse().expect("display output parses");
        assert_eq!(back, p);
        assert_eq!(
            p.inversions(),
            joint_select::perm::kendall_tau(&Permutation::identity(p.len()), &p)
                .unwrap()
                .count()
        );
    }
});
