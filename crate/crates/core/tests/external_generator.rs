use std::cell::Cell;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use contagion_core::affect::{Band, Emotion};
use contagion_core::observation::Lexicon;
use contagion_core::orchestration::StrategyName;
use contagion_core::response::{call_external_generator, Fallback, GenerationRequest, Generated, GeneratorConfig};

thread_local! {
    static WARNINGS: Cell<usize> = const { Cell::new(0) };
}

struct CountingLogger;

impl log::Log for CountingLogger {
    fn enabled(&self, _: &log::Metadata) -> bool {
        true
    }

    fn log(&self, record: &log::Record) {
        if record.level() == log::Level::Warn {
            WARNINGS.with(|w| w.set(w.get() + 1));
        }
    }

    fn flush(&self) {}
}

static LOGGER: CountingLogger = CountingLogger;

fn init_logger() {
    let _ = log::set_logger(&LOGGER);
    log::set_max_level(log::LevelFilter::Warn);
}

fn warnings() -> usize {
    WARNINGS.with(|w| w.get())
}

/// Serves one request; returns the endpoint and a channel yielding the request body.
fn serve_once(reply: &'static str, delay: Duration) -> (String, mpsc::Receiver<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream);
        let mut length = 0;
        loop {
            let mut line = String::new();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" || line.is_empty() {
                break;
            }
            if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                length = v.trim().parse().unwrap();
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let _ = tx.send(String::from_utf8(body).unwrap());
        thread::sleep(delay);
        let response = format!(
            "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{reply}",
            reply.len()
        );
        let _ = reader.get_mut().write_all(response.as_bytes());
    });
    (format!("http://{addr}/generate"), rx)
}

fn request() -> GenerationRequest {
    GenerationRequest {
        strategy: StrategyName::Uplift,
        group_class: Band::Negative,
        dominant_emotion: Emotion::Sadness,
        target_recent_text: "i feel sad".into(),
        max_tokens: 32,
    }
}

fn config(endpoint: Option<String>, timeout_ms: u64) -> GeneratorConfig {
    GeneratorConfig {
        enabled: true,
        endpoint,
        timeout_ms,
        ..GeneratorConfig::default()
    }
}

#[test]
fn disabled_makes_no_call() {
    let lex = Lexicon::builtin();
    let off = GeneratorConfig {
        endpoint: Some("http://127.0.0.1:9/never".into()),
        ..GeneratorConfig::default()
    };
    assert_eq!(
        call_external_generator(&request(), &off, 0.7, &lex),
        Generated::Fallback(Fallback::Disabled)
    );
    assert_eq!(
        call_external_generator(&request(), &config(None, 100), 0.7, &lex),
        Generated::Fallback(Fallback::Disabled)
    );
}

#[test]
fn on_tone_text_is_used_and_request_has_contract_fields() {
    init_logger();
    let lex = Lexicon::builtin();
    let (endpoint, body) = serve_once(r#"{"text": "this is great, glad you are here"}"#, Duration::ZERO);
    let got = call_external_generator(&request(), &config(Some(endpoint), 2000), 0.7, &lex);
    assert_eq!(got, Generated::Text("this is great, glad you are here".into()));
    let sent: serde_json::Value = serde_json::from_str(&body.recv().unwrap()).unwrap();
    assert_eq!(sent["strategy"], "uplift");
    assert_eq!(sent["group_class"], "negative");
    assert_eq!(sent["dominant_emotion"], "sadness");
    assert_eq!(sent["target_recent_text"], "i feel sad");
    assert_eq!(sent["max_tokens"], 32);
    assert_eq!(warnings(), 0);
}

#[test]
fn off_valence_text_falls_back() {
    init_logger();
    let lex = Lexicon::builtin();
    let (endpoint, _body) = serve_once(r#"{"text": "i feel sad and lonely"}"#, Duration::ZERO);
    match call_external_generator(&request(), &config(Some(endpoint), 2000), 0.7, &lex) {
        Generated::Fallback(Fallback::OffValence { score, .. }) => assert!((score + 0.55).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
    assert_eq!(warnings(), 1);
}

#[test]
fn timeout_falls_back_and_logs_once() {
    init_logger();
    let lex = Lexicon::builtin();
    let (endpoint, _body) = serve_once(r#"{"text": "great"}"#, Duration::from_millis(1500));
    let start = Instant::now();
    let got = call_external_generator(&request(), &config(Some(endpoint), 200), 0.7, &lex);
    assert!(matches!(got, Generated::Fallback(Fallback::Transport(_))), "{got:?}");
    assert!(start.elapsed() < Duration::from_millis(1400));
    assert_eq!(warnings(), 1);
}

#[test]
fn malformed_reply_falls_back() {
    init_logger();
    let lex = Lexicon::builtin();
    let (endpoint, _body) = serve_once(r#"{"message": "hi"}"#, Duration::ZERO);
    let got = call_external_generator(&request(), &config(Some(endpoint), 2000), 0.7, &lex);
    assert!(matches!(got, Generated::Fallback(Fallback::Transport(_))));
}

#[test]
fn unreachable_endpoint_falls_back() {
    let lex = Lexicon::builtin();
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let endpoint = format!("http://{}/x", listener.local_addr().unwrap());
    drop(listener);
    let got = call_external_generator(&request(), &config(Some(endpoint), 500), 0.7, &lex);
    assert!(matches!(got, Generated::Fallback(Fallback::Transport(_))));
}
