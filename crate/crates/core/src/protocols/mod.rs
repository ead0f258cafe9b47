//! Two-party protocols run on a shared statevector with a resource ledger.

mod backcomm;
mod comparator;
mod erasure;
mod lab;
mod nisan;
mod otp;
mod rsp;
mod vm;

pub use backcomm::{
    backcomm_uxoxo, backcomm_uxoxo_coherent, backcomm_uxoxo_exchanged, bits_of, uxoxo_forward_cobit, MAX_BACKCOMM_M,
};
pub use comparator::{coherent_comparator, run_comparator, MAX_CMP_M};
pub use erasure::{alice_qubit, coherent_erasure_2bit, erasure_basis_input, erasure_input, reference_pair, split_qubit};
pub use lab::{alice_entropy, CostLedger, Lab, LedgerReport, ProtocolReport, ProtocolResult};
pub use nisan::{fingerprint_bits, nisan_compare, ordering_name, randomized_cost, NisanOutcome};
pub use otp::{
    base_output, extraction_error, message_input, one_time_pad_transform, otp_report, phi_bar, run_unpadded,
    superposed_input, BaseExchange, BaseLayout, ConstantGarbageExchange, OtpReport, XoxoExchange,
};
pub use rsp::{rsp_beta, rsp_cocobit, rsp_cost, rsp_f_beta, rsp_moment_check, rsp_montecarlo, RspMoments, RspMonteCarlo};
pub use vm::{induced_permutation, oracle_table, simulate_vm, simulate_vm_dag, vm_basis_input};
