use std::time::Duration;

use omt_client::OmtClient;
use omt_core::omt::tree::FIXTURE_JSON;
use omt_core::omt::session::read_script;
use omt_core::omt::{Answer, OmtTree};
use omt_core::suite::SuiteConfig;
use omt_service::{serve, AppState};
use tokio::net::TcpListener;

async fn spawn() -> OmtClient {
    let listener = TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let state = AppState::new(OmtTree::embedded(), Duration::from_secs(60));
    tokio::spawn(serve(listener, state, std::future::pending()));
    OmtClient::new(format!("http://{addr}/"))
}

const CHEMICAL: &str = include_str!("../../core/fixtures/chemical.lp");
const CHEMICAL_SCRIPT: &str = include_str!("../../core/fixtures/chemical_script.json");

#[tokio::test]
async fn tree_and_health() {
    let c = spawn().await;
    assert_eq!(c.health().await.unwrap().status, "ok");
    assert_eq!(c.omt_text().await.unwrap(), FIXTURE_JSON);
    assert_eq!(c.omt().await.unwrap().root, 0);
}

#[tokio::test]
async fn classify_matches_local_bytes() {
    let c = spawn().await;
    assert_eq!(c.classify_text(CHEMICAL).await.unwrap(), omt_service::classify_text(CHEMICAL).unwrap());
    let r = c.classify(CHEMICAL).await.unwrap();
    assert!(!r.constraints.is_empty());
    let e = c.classify("x +").await.unwrap_err();
    assert_eq!(e.body().unwrap().code, "PARSE_ERROR");
}

#[tokio::test]
async fn scripted_session_yields_model() {
    let c = spawn().await;
    let v = c.create_session().await.unwrap();
    let mut last = v.clone();
    for a in read_script(CHEMICAL_SCRIPT).unwrap() {
        last = c.answer(&v.id, &a).await.unwrap();
    }
    assert!(last.complete);
    let lp = c.model_lp(&v.id).await.unwrap();
    assert!(lp.contains("b1_set_packing: y_1 + y_2 <= 1;"), "{lp}");
    assert!(lp.contains("b2_conditional_bound_1: b_1 - 50 y_1 <= 0;"));
    assert!(lp.contains("b5_fixed_upper_bound: s_1 <= 100;"));

    let doc = c.export(&v.id).await.unwrap();
    c.delete_session(&v.id).await.unwrap();
    assert_eq!(c.session(&v.id).await.unwrap_err().body().unwrap().code, "SESSION_NOT_FOUND");
    c.import_session(&doc).await.unwrap();
    assert_eq!(c.model_lp(&v.id).await.unwrap(), lp);
}

#[tokio::test]
async fn back_undoes_last_answer() {
    let c = spawn().await;
    let v = c.create_session().await.unwrap();
    let moved = c.answer(&v.id, &Answer::Choose(2)).await.unwrap();
    assert_eq!(moved.cursor, 1);
    assert_eq!(c.back(&v.id).await.unwrap().cursor, 0);
    assert_eq!(c.back(&v.id).await.unwrap_err().body().unwrap().code, "BACK_AT_ROOT");
}

#[tokio::test]
async fn ontology_and_suite() {
    let c = spawn().await;
    assert!(c.ontology().await.unwrap().contains("#SetCovering"));
    let r = c.verify_encodings(&SuiteConfig { max_binaries: 2, instances: 1, ..SuiteConfig::default() }).await.unwrap();
    assert!(r.all_equivalent());
}
