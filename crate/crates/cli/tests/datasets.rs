//! The built-in tables must match the published rows digit for digit.

use qdist_cli::datasets::{render_table, TABLE1, TABLE2};
use sha2::{Digest, Sha256};

const TABLE1_TEXT: &str = "\
1 (2.00, 0.00, 0.00, 0.00) -1.45 -0.93 A yes
2 (0.00, 0.00, 0.00, 2.00) 0.82 0.50 B yes
3 (0.35, 0.20, 0.00, 0.00) -0.79 -0.71 A yes
4 (0.23, 0.19, 0.08, 0.07) -0.54 -0.51 A yes
5 (1.32, 3.62, 1.57, 4.32) 0.74 0.48 B yes
6 (0.15, 0.17, 0.82, 0.98) 1.26 0.72 B yes
7 (0.18, 0.10, 1.02, 0.59) 0.98 0.76 B yes
8 (0.97, 0.17, 0.17, 0.03) -1.37 -0.93 A yes
9 (0.68, 0.25, 0.00, 0.00) -1.18 -0.79 A yes
10 (0.83, 0.48, 1.44, 0.83) 0.67 0.17 B yes
11 (1.27, 1.06, 3.48, 2.92) 1.13 0.76 B yes
12 (0.40, 0.40, 0.40, 0.40) -0.10 -0.26 A yes
13 (0.09, 0.15, 0.49, 0.85) 0.80 0.55 B yes
14 (0.10, 0.55, 0.06, 0.32) -0.19 -0.28 A yes
15 (1.94, 0.34, 0.34, 0.06) -1.22 -1.10 A yes
16 (3.42, 1.24, 1.97, 0.72) -0.34 -0.39 A yes
17 (0.66, 0.00, 1.80, 0.00) 0.40 -0.02 A no
";

const TABLE2_TEXT: &str = "\
1 (2.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00) -1.24 -0.84 A yes
2 (0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.00, 0.60) 0.77 0.55 B yes
3 (1.77, 0.00, 0.00, 0.00, 1.24, 0.00, 0.00, 0.00) -0.92 -0.52 A yes
4 (0.40, 0.23, 0.11, 0.06, 0.03, 0.02, 0.01, 0.01) -0.45 -0.14 A yes
5 (0.00, 0.00, 1.23, 1.23, 0.00, 0.00, 0.33, 0.33) 0.17 0.10 B yes
6 (0.30, 0.03, 0.30, 0.03, 1.12, 0.10, 1.12, 0.10) -0.11 -0.24 A yes
7 (0.42, 0.90, 0.35, 0.76, 0.00, 0.00, 0.00, 0.00) -0.28 -0.21 A yes
8 (0.54, 0.54, 0.00, 0.00, 0.54, 0.54, 0.00, 0.00) -0.43 -0.50 A yes
9 (0.11, 1.24, 0.19, 2.15, 0.06, 0.72, 0.11, 1.24) 0.40 -0.17 A no
";

const TABLE1_SHA256: &str = "5c1278120924f16645c53c3249ac3af746756b9d8ead14f4cd2d86b9037aa0ea";
const TABLE2_SHA256: &str = "1d9670da0451d841fa183840898d096709dd90fd7b951a022a2c29ed30075e9c";

fn sha256_hex(s: &str) -> String {
    Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn table1_verbatim() {
    assert_eq!(render_table(&TABLE1), TABLE1_TEXT);
    assert_eq!(sha256_hex(&render_table(&TABLE1)), TABLE1_SHA256);
}

#[test]
fn table2_verbatim() {
    assert_eq!(render_table(&TABLE2), TABLE2_TEXT);
    assert_eq!(sha256_hex(&render_table(&TABLE2)), TABLE2_SHA256);
}

#[test]
fn table_references() {
    assert_eq!(TABLE1.reference_a, &[1.0, 0.0, 0.0, 0.0]);
    assert_eq!(TABLE1.reference_b, &[0.0, 0.0, 1.0, 1.0]);
    let mut e1 = [0.0; 8];
    e1[0] = 1.0;
    let mut e8 = [0.0; 8];
    e8[7] = 1.0;
    assert_eq!(TABLE2.reference_a, &e1);
    assert_eq!(TABLE2.reference_b, &e8);
}
