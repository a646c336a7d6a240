import { Store } from "./store.js";

/** Chat pane: transcript plus input; replies mutate the shared store. */
export function renderChat(store: Store, root: HTMLElement): void {
  const { chatTranscript } = store.state;
  root.textContent = "";

  const transcript = document.createElement("ul");
  transcript.className = "chat-transcript";
  for (const message of chatTranscript) {
    const item = document.createElement("li");
    item.className = `chat-message chat-${message.who}`;
    item.textContent = message.text;
    transcript.append(item);
  }
  root.append(transcript);

  const input = document.createElement("input");
  input.type = "text";
  input.className = "chat-input";
  input.placeholder = 'Try "Where is Aqeela?"';
  const send = document.createElement("button");
  send.type = "button";
  send.className = "chat-send";
  send.textContent = "Send";
  const submit = () => {
    const message = input.value;
    input.value = "";
    void store.submitChat(message);
  };
  send.addEventListener("click", submit);
  input.addEventListener("keydown", (event: KeyboardEvent) => {
    if (event.key === "Enter") submit();
  });
  root.append(input, send);
}
